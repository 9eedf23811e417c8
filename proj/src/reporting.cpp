#include "oobc/reporting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace oobc {

LoadError::LoadError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  int line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    std::string_view raw = text.substr(start, end - start);
    auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    f(line, raw);
    start = end + 1;
  }
}

}  // namespace

PermissionMap parse_permission_map(std::string_view text) {
  PermissionMap pm;
  for_each_line(text, [&](int line, std::string_view raw) {
    if (trim(raw).empty()) return;
    auto tab = raw.find('\t');
    if (tab == std::string_view::npos) throw LoadError(line, "expected api<TAB>PERMISSION");
    std::string api = trim(raw.substr(0, tab));
    std::string perm = trim(raw.substr(tab + 1));
    if (api.empty() || perm.empty() || perm.find('\t') != std::string::npos) {
      throw LoadError(line, "expected api<TAB>PERMISSION");
    }
    pm.apis[api].insert(perm);
  });
  return pm;
}

std::set<std::string> parse_manifest(std::string_view text) {
  std::set<std::string> out;
  for_each_line(text, [&](int line, std::string_view raw) {
    std::string p = trim(raw);
    if (p.empty()) return;
    if (p.find_first_of(" \t") != std::string::npos) throw LoadError(line, "one permission per line");
    out.insert(p);
  });
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view finding_kind_name(PermissionFinding::Kind k) {
  return k == PermissionFinding::Kind::UnusedPermission ? "unused-permission" : "missing-permission";
}

namespace {

// api -> (call sites, witness node ids)
struct ApiUse {
  std::set<StmtId> sites;
  std::set<std::string> nodes;
};

std::map<std::string, ApiUse> api_uses(const AnalysisResult& result) {
  std::map<std::string, ApiUse> out;
  for (const Node& n : result.graph.nodes) {
    for (const AnalysisEvent& e : n.events) {
      if (e.kind != EventKind::ApiCall) continue;
      auto& use = out[e.subject];
      use.sites.insert(e.site);
      use.nodes.insert(n.id);
    }
  }
  return out;
}

}  // namespace

std::vector<PermissionFinding> permission_report(const AnalysisResult& result, const std::set<std::string>& declared,
                                                 const PermissionMap& pm) {
  // permission -> first (api, witness) that needs it
  std::map<std::string, std::pair<std::string, std::string>> used;
  for (const auto& [api, use] : api_uses(result)) {
    auto it = pm.apis.find(api);
    if (it == pm.apis.end()) continue;
    for (const auto& perm : it->second) used.emplace(perm, std::make_pair(api, *use.nodes.begin()));
  }
  std::vector<PermissionFinding> out;
  for (const auto& perm : declared) {
    if (!used.count(perm)) out.push_back({PermissionFinding::Kind::UnusedPermission, perm, std::nullopt, std::nullopt});
  }
  for (const auto& [perm, witness] : used) {
    if (!declared.count(perm)) {
      out.push_back({PermissionFinding::Kind::MissingPermission, perm, witness.first, witness.second});
    }
  }
  return out;
}

std::string findings_text(const std::vector<PermissionFinding>& findings) {
  std::string out;
  for (const auto& f : findings) {
    out += std::string(finding_kind_name(f.kind)) + "\t" + f.permission;
    if (f.api) out += "\t" + *f.api;
    if (f.state) out += "\t" + *f.state;
    out += "\n";
  }
  return out;
}

std::vector<ApiDumpEntry> api_dump(const AnalysisResult& result) {
  std::vector<ApiDumpEntry> out;
  for (const auto& [api, use] : api_uses(result)) {
    out.push_back(ApiDumpEntry{api, use.sites.size(), {use.nodes.begin(), use.nodes.end()}});
  }
  return out;
}

std::string api_dump_text(const std::vector<ApiDumpEntry>& dump) {
  std::string out;
  for (const auto& e : dump) out += e.api + "\t" + std::to_string(e.call_sites) + "\n";
  return out;
}

std::vector<HeatEntry> heat_map(const AnalysisResult& result) {
  const ClassTable& ct = *result.ct;
  std::map<StmtId, std::pair<std::size_t, std::size_t>> counts;
  for (const Node& n : result.graph.nodes) {
    if (n.config.code.prelude != kNoId) continue;
    StmtId s = head_stmt(ct, n.config.code);
    if (s == kNoId) continue;
    auto& c = counts[s];
    ++c.first;
    c.second += n.visits;
  }
  std::vector<HeatEntry> out;
  for (MethodId m = 0; m < ct.method_count(); ++m) {
    const MethodInfo& info = ct.method(m);
    if (info.synthesized) continue;
    std::optional<std::int64_t> line;
    for (std::uint32_t i = 0; i < info.def->body.size(); ++i) {
      const Stmt& st = info.def->body[i];
      if (auto l = st.as<stmt::Line>()) line = l->number;
      HeatEntry e{info.qualified, i, line, st.pos, 0, 0};
      if (auto it = counts.find(info.first_stmt + i); it != counts.end()) {
        e.states = it->second.first;
        e.revisits = it->second.second;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::string heat_map_text(const std::vector<HeatEntry>& heat) {
  std::string out = "method\tindex\tline\tstates\trevisits\n";
  for (const auto& e : heat) {
    out += e.method + "\t" + std::to_string(e.index) + "\t" + (e.line ? std::to_string(*e.line) : "-") + "\t" +
           std::to_string(e.states) + "\t" + std::to_string(e.revisits) + "\n";
  }
  return out;
}

std::vector<StateVerdict> compute_verdicts(const AnalysisResult& result, const PredicateProgram* pp) {
  std::vector<StateVerdict> out(result.graph.nodes.size());
  if (!pp) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Node& n = result.graph.nodes[i];
    out[i] = evaluate(*pp, *result.ct, StateView{n.config, n.events});
  }
  return out;
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string head_text(const ClassTable& ct, const Code& code) {
  if (code.is_halted()) return "halt";
  const Stmt* s = head(ct, code);
  return s ? print_stmt(*s) : "<end of body>";
}

}  // namespace

std::string export_dot(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts) {
  const ClassTable& ct = *result.ct;
  std::ostringstream out;
  out << "digraph states {\n";
  out << "  node [shape=box, style=filled, fillcolor=white, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < result.graph.nodes.size(); ++i) {
    const Node& n = result.graph.nodes[i];
    std::string label = describe(ct, n.config.code) + "\n" + head_text(ct, n.config.code) + "\nfp: " +
                        describe(ct, n.config.fp);
    out << "  " << n.id << " [label=\"" << dot_escape(label) << "\"";
    if (i < verdicts.size() && verdicts[i].color) {
      const std::string& color = *verdicts[i].color;
      auto comma = color.find(',');
      out << ", fillcolor=\"" << dot_escape(color.substr(0, comma)) << "\"";
      if (comma != std::string::npos) out << ", " << color.substr(comma + 1);
    }
    if (n.truncated) out << ", peripheries=2";
    if (n.root) out << ", penwidth=2";
    out << "];\n";
  }
  for (const Edge& e : result.graph.edges) {
    out << "  " << result.graph.nodes[e.from].id << " -> " << result.graph.nodes[e.to].id << " [label=\""
        << dot_escape(e.rule) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

Json events_json(const ClassTable& ct, const std::vector<AnalysisEvent>& events) {
  Json out = Json::array();
  for (const auto& e : events) {
    out.push_back(Json{{"kind", event_kind_name(e.kind)},
                       {"site", e.site == kNoId ? Json(nullptr) : Json(ct.site_name(e.site))},
                       {"subject", e.subject}});
  }
  return out;
}

Json options_json(const AnalysisResult& r) {
  const auto& o = r.options;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"class", e.class_name}, {"method", e.method_name}, {"reason", entry_reason_name(e.reason)}});
  }
  return Json{{"k", o.policy.depth()},
              {"mode", o.policy.mode == AllocationPolicy::Mode::Monovariant ? "monovariant" : "context-sensitive"},
              {"widen", o.widen},
              {"gc", o.gc && !o.widen},
              {"cutoff", o.cutoff ? Json(*o.cutoff) : Json(nullptr)},
              {"single_pass", o.single_pass},
              {"entries", entries}};
}

}  // namespace

Json export_json_value(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts,
                       const std::vector<PermissionFinding>& findings) {
  const ClassTable& ct = *result.ct;
  Json nodes = Json::array();
  for (std::size_t i = 0; i < result.graph.nodes.size(); ++i) {
    const Node& n = result.graph.nodes[i];
    StmtId site = head_stmt(ct, n.config.code);
    Json verdict = nullptr;
    if (i < verdicts.size() && verdicts[i].rule) {
      verdict = Json{{"color", *verdicts[i].color}, {"truncated", verdicts[i].truncated}, {"rule", *verdicts[i].rule}};
    }
    Json head = nullptr, pos = nullptr;
    if (site != kNoId) {
      const Stmt& st = *ct.statement(site).stmt;
      head = print_stmt(st);
      if (st.pos.line > 0) pos = Json{{"line", st.pos.line}, {"column", st.pos.column}};
    }
    nodes.push_back(Json{{"id", n.id},
                         {"key", n.key},
                         {"code", describe(ct, n.config.code)},
                         {"method", n.config.code.method == kNoId ? Json(nullptr)
                                                                   : Json(ct.method(n.config.code.method).qualified)},
                         {"site", site == kNoId ? Json(nullptr) : Json(ct.site_name(site))},
                         {"head", head},
                         {"pos", pos},
                         {"final", n.config.code.is_halted()},
                         {"root", n.root},
                         {"truncated", n.truncated},
                         {"visits", n.visits},
                         {"fp", to_json(ct, n.config.fp)},
                         {"ka", to_json(ct, n.config.ka)},
                         {"store", to_json(ct, abstract_gc(n.config, *n.store))},
                         {"events", events_json(ct, n.events)},
                         {"verdict", verdict}});
  }
  Json edges = Json::array();
  for (const Edge& e : result.graph.edges) {
    edges.push_back(Json{{"from", result.graph.nodes[e.from].id}, {"to", result.graph.nodes[e.to].id}, {"rule", e.rule}});
  }
  Json heat = Json::array();
  for (const auto& h : heat_map(result)) {
    heat.push_back(Json{{"method", h.method},
                        {"index", h.index},
                        {"line", h.line ? Json(*h.line) : Json(nullptr)},
                        {"pos", Json{{"line", h.pos.line}, {"column", h.pos.column}}},
                        {"states", h.states},
                        {"revisits", h.revisits}});
  }
  Json apis = Json::array();
  for (const auto& a : api_dump(result)) {
    apis.push_back(Json{{"api", a.api}, {"call_sites", a.call_sites}, {"witnesses", a.witnesses}});
  }
  Json fs = Json::array();
  for (const auto& f : findings) {
    fs.push_back(Json{{"kind", finding_kind_name(f.kind)},
                      {"permission", f.permission},
                      {"api", f.api ? Json(*f.api) : Json(nullptr)},
                      {"state", f.state ? Json(*f.state) : Json(nullptr)}});
  }
  return Json{{"schema", kExportSchemaVersion},
              {"options", options_json(result)},
              {"nodes", nodes},
              {"edges", edges},
              {"heatmap", heat},
              {"apis", apis},
              {"findings", fs},
              {"store_size", result.store.size()},
              {"passes", result.passes},
              {"steps", result.steps},
              {"incomplete", result.incomplete()},
              {"cutoff_hit", result.cutoff_hit},
              {"truncated", result.truncated},
              {"warnings", result.warnings}};
}

std::string export_json(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts,
                        const std::vector<PermissionFinding>& findings) {
  return export_json_value(result, verdicts, findings).dump(1) + "\n";
}

}  // namespace oobc
