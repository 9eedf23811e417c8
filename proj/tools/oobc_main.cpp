// oobc: static analyzer and reference interpreter for .oobc bytecode.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "oobc/concrete.hpp"
#include "oobc/engine.hpp"
#include "oobc/reporting.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIncomplete = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct AnalyzeArgs {
  std::string program;
  std::size_t k = 0;
  bool no_widen = false;
  bool gc = false;
  std::optional<std::size_t> cutoff;
  std::vector<std::string> entries;
  std::vector<std::string> lifecycle;
  std::string predicates, permission_map, manifest, dot, json, report_dir;
  int workers = 0;
  bool single_pass = false;
};

int analyze(const AnalyzeArgs& a) {
  std::shared_ptr<const oobc::ClassTable> ct;
  oobc::ExploreOptions options;
  std::vector<oobc::EntryPoint> entries;
  oobc::PermissionMap pm;
  std::set<std::string> declared;
  std::vector<std::string> warnings;
  try {
    ct = oobc::ClassTable::from_source(oobc::read_file(a.program));
    oobc::EntryConfig ec;
    if (!a.lifecycle.empty()) ec.lifecycle = a.lifecycle;
    ec.explicit_entries = a.entries;
    entries = oobc::find_entry_points(*ct, ec, &warnings);
    options.policy = oobc::AllocationPolicy::with_k(a.k);
    options.widen = !a.no_widen;
    options.gc = a.gc;
    options.cutoff = a.cutoff;
    options.workers = a.workers;
    options.single_pass = a.single_pass;
    if (!a.predicates.empty()) {
      options.predicates =
          std::make_shared<const oobc::PredicateProgram>(oobc::parse_predicates(oobc::read_file(a.predicates)));
    }
    if (!a.permission_map.empty()) pm = oobc::parse_permission_map(oobc::read_file(a.permission_map));
    if (!a.manifest.empty()) declared = oobc::parse_manifest(oobc::read_file(a.manifest));
  } catch (const std::exception& e) {
    std::cerr << "oobc: " << e.what() << "\n";
    return kExitInput;
  }
  if (a.gc && options.widen) std::cerr << "oobc: --gc has no effect with a widened store\n";

  oobc::AnalysisResult result = oobc::analyze_all_entries(*ct, entries, options);
  result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
  for (const auto& w : result.warnings) std::cerr << "oobc: warning: " << w << "\n";

  auto verdicts = oobc::compute_verdicts(result, options.predicates.get());
  std::vector<oobc::PermissionFinding> findings;
  if (!a.permission_map.empty() || !a.manifest.empty()) findings = oobc::permission_report(result, declared, pm);

  try {
    if (!a.dot.empty()) write_file(a.dot, oobc::export_dot(result, verdicts));
    if (!a.json.empty()) write_file(a.json, oobc::export_json(result, verdicts, findings));
    if (!a.report_dir.empty()) {
      std::filesystem::create_directories(a.report_dir);
      std::filesystem::path dir(a.report_dir);
      write_file((dir / "graph.dot").string(), oobc::export_dot(result, verdicts));
      write_file((dir / "export.json").string(), oobc::export_json(result, verdicts, findings));
      write_file((dir / "apis.txt").string(), oobc::api_dump_text(oobc::api_dump(result)));
      write_file((dir / "heatmap.txt").string(), oobc::heat_map_text(oobc::heat_map(result)));
      write_file((dir / "permissions.txt").string(), oobc::findings_text(findings));
    }
  } catch (const std::exception& e) {
    std::cerr << "oobc: " << e.what() << "\n";
    return kExitInput;
  }

  std::cout << "entries: " << result.entries.size() << "\n"
            << "states: " << result.graph.nodes.size() << "\n"
            << "edges: " << result.graph.edges.size() << "\n"
            << "passes: " << result.passes << "\n"
            << "store: " << result.store.size() << " bindings\n";
  for (const auto& e : oobc::api_dump(result)) std::cout << "api: " << e.api << " (" << e.call_sites << " sites)\n";
  std::cout << oobc::findings_text(findings);
  if (result.incomplete()) {
    std::cout << "incomplete:" << (result.cutoff_hit ? " cutoff" : "") << (result.truncated ? " truncated" : "")
              << "\n";
    return kExitIncomplete;
  }
  return kExitOk;
}

int run(const std::string& program, const std::string& entry, std::size_t fuel, const std::string& trace_out) {
  std::shared_ptr<const oobc::ClassTable> ct;
  oobc::MethodId m = oobc::kNoId;
  try {
    ct = oobc::ClassTable::from_source(oobc::read_file(program));
    auto found = ct->find_method(entry);
    if (!found) throw oobc::ConfigError("entry point " + entry + " not found");
    m = *found;
  } catch (const std::exception& e) {
    std::cerr << "oobc: " << e.what() << "\n";
    return kExitInput;
  }
  auto r = oobc::concrete::run_concrete(*ct, m, fuel);
  std::string text = oobc::concrete::to_json(*ct, r).dump(1) + "\n";
  if (trace_out.empty()) {
    std::cout << text;
  } else {
    write_file(trace_out, text);
  }
  const auto& t = r.traces.front();
  std::cerr << "oobc: " << t.states.size() << " states, " << oobc::concrete::termination_name(t.termination)
            << (t.error.empty() ? "" : ": " + t.error) << "\n";
  return t.termination == oobc::concrete::Termination::Halted ? kExitOk : kExitIncomplete;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static analyzer for object-oriented bytecode"};
  app.require_subcommand(1);

  AnalyzeArgs a;
  auto* analyze_cmd = app.add_subcommand("analyze", "Explore the abstract state space of a program");
  analyze_cmd->add_option("program", a.program, "Program (.oobc)")->required();
  analyze_cmd->add_option("--k", a.k, "Call-site context depth")->default_val(0);
  bool widen_flag = false;
  auto* widen_opt = analyze_cmd->add_flag("--widen", widen_flag, "Use a single widened store (default)");
  analyze_cmd->add_flag("--no-widen", a.no_widen, "Keep a store per state")->excludes(widen_opt);
  analyze_cmd->add_flag("--gc", a.gc, "Abstract garbage collection (per-state stores only)");
  analyze_cmd->add_option("--cutoff", a.cutoff, "Stop each exploration after N steps");
  analyze_cmd->add_option("--entry", a.entries, "Extra entry point CLASS/METHOD");
  analyze_cmd->add_option("--lifecycle", a.lifecycle, "Override the lifecycle method names");
  analyze_cmd->add_option("--predicates", a.predicates, "Predicate file");
  analyze_cmd->add_option("--permission-map", a.permission_map, "Permission map (api<TAB>PERMISSION)");
  analyze_cmd->add_option("--manifest", a.manifest, "Declared permissions, one per line");
  analyze_cmd->add_option("--dot", a.dot, "Write the state graph as DOT");
  analyze_cmd->add_option("--json", a.json, "Write the JSON export");
  analyze_cmd->add_option("--report", a.report_dir, "Write all reports into a directory");
  analyze_cmd->add_option("--workers", a.workers, "Worker threads (0: all cores)")->default_val(0);
  analyze_cmd->add_flag("--single-pass", a.single_pass, "One sweep over the entry points");

  std::string program, entry, trace_out;
  std::size_t fuel = 500;
  auto* run_cmd = app.add_subcommand("run", "Run one entry point on the concrete interpreter");
  run_cmd->add_option("program", program, "Program (.oobc)")->required();
  run_cmd->add_option("--entry", entry, "Entry point CLASS/METHOD")->required();
  run_cmd->add_option("--fuel", fuel, "Maximum steps")->default_val(500);
  run_cmd->add_option("--trace", trace_out, "Write the JSON trace here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    if (*analyze_cmd) return analyze(a);
    return run(program, entry, fuel, trace_out);
  } catch (const std::exception& e) {
    std::cerr << "oobc: " << e.what() << "\n";
    return kExitInput;
  }
}
