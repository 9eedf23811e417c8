#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "oobc/frontend.hpp"
#include "oobc/reflection.hpp"

namespace oobc::testing {

std::string corpus_dir() { return OOBC_CORPUS_DIR; }

std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".oobc") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string corpus_text(const std::string& name) { return read_file(corpus_dir() + "/" + name); }

std::shared_ptr<const ClassTable> load_corpus(const std::string& name) {
  return ClassTable::from_source(corpus_text(name));
}

std::shared_ptr<const ClassTable> load_text(const std::string& text) { return ClassTable::from_source(text); }

std::vector<EntryPoint> default_entries(const ClassTable& ct) { return find_entry_points(ct, EntryConfig{}); }

AnalysisResult analyze(const ClassTable& ct, const ExploreOptions& options) {
  return analyze_all_entries(ct, default_entries(ct), options);
}

AnalysisResult analyze(const ClassTable& ct, const std::vector<EntryPoint>& entries, const ExploreOptions& options) {
  return analyze_all_entries(ct, entries, options);
}

ExploreOptions options_for(std::size_t k, bool widen, bool gc) {
  ExploreOptions o;
  o.policy = AllocationPolicy::with_k(k);
  o.widen = widen;
  o.gc = gc;
  o.workers = 1;
  return o;
}

SoundnessReport check_soundness(const ClassTable& ct, const std::vector<EntryPoint>& entries,
                                const AnalysisResult& result, std::size_t fuel) {
  SoundnessReport report;
  report.abstract_states = result.graph.nodes.size();
  std::vector<MethodId> ids;
  for (const auto& e : entries) ids.push_back(e.method);
  concrete::Run run = concrete::run_concrete(ct, ids, fuel);
  concrete::PointerMap pm(run.allocations, result.options.policy.depth());
  auto scope = !result.options.widen && result.options.gc ? concrete::Scope::Reachable : concrete::Scope::AllBindings;

  std::multimap<Config, const Node*> by_config;
  for (const auto& n : result.graph.nodes) by_config.emplace(n.config, &n);

  for (const auto& trace : run.traces) {
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
      const auto& s = trace.states[i];
      ++report.concrete_states;
      Config image{s.code, pm.frame(s.frame), pm.kont(s.kont)};
      auto [lo, hi] = by_config.equal_range(image);
      bool covered = false;
      for (auto it = lo; it != hi && !covered; ++it)
        covered = concrete::abstracts(it->second->config, *it->second->store, s, pm, scope);
      if (!covered) {
        report.failures.push_back(ct.method(trace.entry).qualified + " state " + std::to_string(i) + " at " +
                                  describe(ct, s.code) + (lo == hi ? " (no node with that configuration)" : ""));
      }
    }
  }
  return report;
}

SoundnessReport check_soundness(const ClassTable& ct, const ExploreOptions& options, std::size_t fuel) {
  auto entries = default_entries(ct);
  return check_soundness(ct, entries, analyze_all_entries(ct, entries, options), fuel);
}

namespace {

struct StringSite {
  std::size_t cls, method, index;
};

std::vector<StringSite> string_sites(const Program& p) {
  std::vector<StringSite> out;
  for (std::size_t c = 0; c < p.classes.size(); ++c)
    for (std::size_t m = 0; m < p.classes[c].methods.size(); ++m) {
      const auto& body = p.classes[c].methods[m].body;
      for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i].is<stmt::ConstString>()) out.push_back({c, m, i});
    }
  return out;
}

Stmt make(StmtNode n) { return Stmt{std::move(n), {}}; }

}  // namespace

std::size_t const_string_count(const Program& program) { return string_sites(program).size(); }

std::string const_string_literal(const Program& program, std::size_t n) {
  auto s = string_sites(program).at(n);
  return program.classes[s.cls].methods[s.method].body[s.index].as<stmt::ConstString>()->literal;
}

bool const_string_is_reflective(const Program& program, std::size_t n) {
  auto s = string_sites(program).at(n);
  const auto& body = program.classes[s.cls].methods[s.method].body;
  const std::string& dest = body[s.index].as<stmt::ConstString>()->dest;
  for (const auto& st : body) {
    auto inv = st.as<stmt::Invoke>();
    if (!inv) continue;
    std::size_t arg = inv->qualified() == kForName ? 0 : inv->qualified() == kGetMethod ? 1 : SIZE_MAX;
    if (arg < inv->args.size() && inv->args[arg].kind == AExpKind::Register && inv->args[arg].name == dest)
      return true;
  }
  return false;
}

std::optional<std::string> with_top_string(const Program& program, std::size_t n) {
  auto sites = string_sites(program);
  if (n >= sites.size()) return std::nullopt;
  Program p = program;
  auto s = sites[n];
  auto& body = p.classes[s.cls].methods[s.method].body;
  const auto cs = *body[s.index].as<stmt::ConstString>();
  std::vector<Stmt> extra;
  extra.push_back(make(stmt::ConstString{"topstr_alt", cs.literal + "-altered"}));
  extra.push_back(make(stmt::FieldGet{"topstr_v", AExp::reg("topstr_alt"), std::string(kStringValueField)}));
  extra.push_back(make(stmt::FieldPut{AExp::reg(cs.dest), std::string(kStringValueField), AExp::reg("topstr_v")}));
  body.insert(body.begin() + static_cast<std::ptrdiff_t>(s.index) + 1, extra.begin(), extra.end());
  return print_program(p);
}

Atom Gen::atom() {
  static const char* kStrings[] = {"a", "b", "android.os.Environment"};
  switch (below(8)) {
    case 0: return atom::Null{};
    case 1: return atom::Void{};
    case 2: return coin() ? top_bool() : exact_bool(coin());
    case 3: return below(4) == 0 ? top_int() : exact_int(static_cast<std::int64_t>(below(3)));
    case 4: return below(4) == 0 ? top_string() : exact_string(kStrings[below(3)]);
    case 5: {
      ObjectPointer op{AllocSite::statement(static_cast<StmtId>(below(3))), {}};
      if (coin()) op.ctx.push_back(static_cast<StmtId>(below(2)));
      return atom::Object{op, static_cast<ClassId>(below(2))};
    }
    case 6: return atom::Method{static_cast<MethodId>(below(3))};
    default:
      if (coin()) return atom::Halt{};
      return atom::Fun{FramePointer{static_cast<MethodId>(below(2)), {}}, Code::at(0, static_cast<std::uint32_t>(below(3))),
                       KontAddr::initial()};
  }
}

AbstractValue Gen::value(std::size_t max_atoms) {
  AbstractValue v;
  std::size_t n = below(max_atoms + 1);
  for (std::size_t i = 0; i < n; ++i) v.insert(atom());
  return v;
}

Addr Gen::addr() {
  static const char* kNames[] = {"x", "y", "f"};
  switch (below(3)) {
    case 0: return RegAddr{coin() ? FramePointer::initial() : FramePointer{0, {}}, kNames[below(3)]};
    case 1: return FieldAddr{ObjectPointer{AllocSite::statement(static_cast<StmtId>(below(2))), {}}, kNames[below(3)]};
    default: return coin() ? KontAddr::initial() : KontAddr{static_cast<StmtId>(below(2)), 0, {}};
  }
}

Store Gen::store(std::size_t max_bindings) {
  Store s;
  std::size_t n = below(max_bindings + 1);
  for (std::size_t i = 0; i < n; ++i) s.join_at(addr(), value(3));
  return s;
}

}  // namespace oobc::testing
