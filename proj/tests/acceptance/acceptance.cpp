// Acceptance run: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oobc/frontend.hpp"
#include "oobc/predicates.hpp"
#include "oobc/reflection.hpp"
#include "oobc/reporting.hpp"
#include "support.hpp"

using namespace oobc;
namespace t = oobc::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  Outcome done(std::string detail) const {
    if (ok_) return {true, std::move(detail)};
    std::string msg;
    for (const auto& f : failures_) msg += (msg.empty() ? "" : "; ") + f;
    return {false, msg};
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
};

constexpr const char* kExecute = "org/apache/http/client/HttpClient/execute";

// Shape of the corpus: size limits and feature coverage.
void check_corpus_coverage(Check& c) {
  auto names = t::corpus_names();
  c.require(names.size() >= 15, "corpus has " + std::to_string(names.size()) + " programs");
  std::set<std::size_t> stmt_kinds;
  std::set<InvokeKind> invoke_kinds;
  std::set<std::string> reflective;
  bool inheritance = false, recursion = false, loop = false;
  for (const auto& name : names) {
    Program p = parse_program(t::corpus_text(name));
    std::size_t count = 0;
    for (const auto& cls : p.classes) {
      if (cls.superclass != kObjectClass && !is_builtin_class(cls.superclass)) inheritance = true;
      for (const auto& m : cls.methods) {
        count += m.body.size();
        LabelMap labels(m);
        for (std::size_t i = 0; i < m.body.size(); ++i) {
          const auto& s = m.body[i];
          stmt_kinds.insert(s.node.index());
          if (s.is<stmt::ConstString>()) reflective.insert("const-string");
          if (auto inv = s.as<stmt::Invoke>()) {
            invoke_kinds.insert(inv->kind);
            if (is_reflective_api(inv->qualified())) reflective.insert(inv->qualified());
            if (inv->class_name == cls.name && inv->method_name == m.name) recursion = true;
          }
          const std::string* target = nullptr;
          if (auto g = s.as<stmt::Goto>()) target = &g->label;
          if (auto f = s.as<stmt::If>()) target = &f->label;
          if (target && labels.position(*target) < i) loop = true;
        }
      }
    }
    c.require(count <= 50, name + " has " + std::to_string(count) + " statements");
  }
  c.require(stmt_kinds.size() == std::variant_size_v<StmtNode>, "not every statement form is covered");
  c.require(invoke_kinds.size() == 5, "not every invoke kind is covered");
  c.require(reflective.size() == 5, "not every reflection rule is covered");
  c.require(inheritance && recursion && loop, "inheritance, recursion or loops missing");
}

Outcome soundness() {
  Check c;
  check_corpus_coverage(c);
  auto start = std::chrono::steady_clock::now();
  std::size_t states = 0, runs = 0;
  struct Setup {
    std::size_t k;
    bool widen, gc;
  };
  const Setup setups[] = {{0, true, false}, {1, true, false}, {0, false, false},
                          {1, false, false}, {0, false, true}, {1, false, true}};
  for (const auto& name : t::corpus_names()) {
    auto ct = t::load_corpus(name);
    for (const auto& s : setups) {
      auto r = t::check_soundness(*ct, t::options_for(s.k, s.widen, s.gc), 500);
      states += r.concrete_states;
      ++runs;
      c.require(r.ok(), name + " k=" + std::to_string(s.k) + (s.widen ? " widened" : " per-state") +
                            (s.gc ? " gc" : "") + ": " + (r.ok() ? "" : r.failures.front()));
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << t::corpus_names().size() << " programs, " << runs << " configurations, " << states
    << " concrete states covered in " << static_cast<int>(secs * 1000) << " ms";
  return c.done(d.str());
}

Outcome termination() {
  Check c;
  std::size_t total = 0;
  for (const auto& name : t::corpus_names()) {
    auto ct = t::load_corpus(name);
    for (std::size_t k = 0; k <= 2; ++k) {
      auto o = t::options_for(k, true);
      o.cutoff = 1'000'000;  // a guard only; hitting it is a failure
      auto a = t::analyze(*ct, o), b = t::analyze(*ct, o);
      std::string tag = name + " k=" + std::to_string(k);
      c.require(!a.cutoff_hit && !a.truncated, tag + " did not finish");
      c.require(a.graph.nodes.size() == b.graph.nodes.size() && a.graph.edges == b.graph.edges,
                tag + " node counts differ between runs");
      total += a.graph.nodes.size();
    }
  }
  return c.done(std::to_string(total) + " nodes over k=0..2, identical on rerun");
}

Outcome lattice_laws() {
  Check c;
  constexpr int kCases = 2000;
  t::Gen g(20240601);
  for (int i = 0; i < kCases; ++i) {
    auto a = g.value(), b = g.value(), x = g.value();
    auto ab = join(a, b);
    c.require(join(a, a) == a, "value join not idempotent");
    c.require(ab == join(b, a), "value join not commutative");
    c.require(join(ab, x) == join(a, join(b, x)), "value join not associative");
    c.require(a.leq(a), "value order not reflexive");
    c.require(!(a.leq(b) && b.leq(a)) || a == b, "value order not antisymmetric");
    c.require(!(a.leq(b) && b.leq(x)) || a.leq(x), "value order not transitive");
    c.require(a.leq(ab) && b.leq(ab), "value join not an upper bound");
    auto n = static_cast<std::int64_t>(g.below(4)), m = static_cast<std::int64_t>(g.below(4));
    c.require(join(AbstractValue{exact_int(n)}, AbstractValue{exact_int(m)}) ==
                  (n == m ? AbstractValue{exact_int(n)} : AbstractValue{top_int()}),
              "flat collapse");

    auto s1 = g.store(), s2 = g.store(), s3 = g.store();
    auto s12 = join(s1, s2);
    c.require(join(s1, s1) == s1, "store join not idempotent");
    c.require(s12 == join(s2, s1), "store join not commutative");
    c.require(join(s12, s3) == join(s1, join(s2, s3)), "store join not associative");
    c.require(s1.leq(s12) && s2.leq(s12), "store join not an upper bound");
    c.require(!(s1.leq(s2) && s2.leq(s1)) || s1 == s2, "store order not antisymmetric");
    auto bigger = join(s1, g.store(2));
    c.require(!bigger.leq(s1) || bigger == s1, "store antisymmetry on related pair");
    c.require(!(s1.leq(s2) && s2.leq(s3)) || s1.leq(s3), "store order not transitive");
  }
  return c.done(std::to_string(kCases) + " generated cases each for values and stores");
}

std::vector<std::pair<std::string, std::size_t>> api_names(const AnalysisResult& r) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& e : api_dump(r)) out.emplace_back(e.api, e.call_sites);
  return out;
}

Outcome reflection_transparency() {
  Check c;
  const std::pair<const char*, const char*> twins[] = {{"env_direct.oobc", "env_reflective.oobc"},
                                                        {"sms_direct.oobc", "sms_reflective.oobc"},
                                                        {"location_direct.oobc", "location_reflective.oobc"}};
  std::size_t variants = 0;
  for (auto [direct, reflective] : twins) {
    auto d = t::load_corpus(direct), r = t::load_corpus(reflective);
    for (std::size_t k : {0u, 1u})
      for (bool widen : {true, false}) {
        auto a = api_names(t::analyze(*d, t::options_for(k, widen)));
        auto b = api_names(t::analyze(*r, t::options_for(k, widen)));
        c.require(!a.empty() && a == b, std::string(reflective) + " api dump differs");
      }
    Program p = parse_program(t::corpus_text(reflective));
    for (std::size_t i = 0; i < t::const_string_count(p); ++i) {
      ++variants;
      std::string tag = std::string(reflective) + " literal \"" + t::const_string_literal(p, i) + "\"";
      try {
        auto ct = t::load_text(*t::with_top_string(p, i));
        auto res = t::analyze(*ct, t::options_for(0, true));
        std::size_t diags = 0;
        for (const auto& n : res.graph.nodes)
          for (const auto& e : n.events) diags += e.kind == EventKind::Diagnostic;
        if (t::const_string_is_reflective(p, i)) c.require(diags > 0, tag + " produced no diagnostic");
        c.require(!res.incomplete(), tag + " incomplete");
      } catch (const std::exception& e) {
        c.require(false, tag + " threw: " + e.what());
      }
    }
  }
  return c.done("3 twin pairs agree; " + std::to_string(variants) + " TopString variants degrade to diagnostics");
}

Outcome multi_entry() {
  Check c;
  auto ct = t::load_corpus("two_entries.oobc");
  auto entries = t::default_entries(*ct);
  c.require(entries.size() == 2, "expected two entries");
  if (entries.size() != 2) return c.done("");
  std::vector<EntryPoint> orders[] = {entries, {entries[1], entries[0]}};
  Store finals[2];
  for (int i = 0; i < 2; ++i) {
    auto r = t::analyze(*ct, orders[i], t::options_for(0, true));
    // The receiver object shared by both entries.
    ObjectPointer receiver{AllocSite::entry_receiver(*ct->find_class("app/Activity")), {}};
    c.require(AbstractValue{exact_int(42)}.leq(r.store.lookup(FieldAddr{receiver, "token"})), "field lacks 42");
    c.require(AbstractValue{exact_int(42)}.leq(r.store.lookup(RegAddr{FramePointer::initial(), "t"})),
              "read in " + orders[i][0].method_name + "-first order misses the write");
    finals[i] = r.store;
  }
  c.require(finals[0] == finals[1], "final stores differ between entry orders");
  return c.done("write of 42 visible at the read in both orders; final stores equal");
}

const char* kUsesApiListing = R"( (lambda (state)
   (if (uses-API? state "org/apache/http/client/HttpClient/execute" st-attr)
       "red,colorscheme=set312"
       #f)))";

const char* kCondListing = R"( (lambda (state) 
   (cond
     [(uses-API? state "org/apache/http/client/HttpClient/execute" st-attr )  "red,colorscheme=set312"]
     [(uses-name? state  "org/ucomb/android/testinterface /RectanglePlus/getArea") "8,colorscheme=set312"]
     [else #f])))";

const char* kTruncateListing = R"( (lambda (state)
   (if (truncate? state "org/apache/http/client/HttpClient/execute")
       "12,colorscheme=set312"
       #f)) )";

Outcome predicate_fidelity() {
  Check c;
  auto leaf = [](Matcher::Kind k, std::string n) { return Matcher{k, std::move(n), {}}; };
  auto p1 = parse_predicates(kUsesApiListing);
  c.require(p1 == PredicateProgram{{Rule{leaf(Matcher::Kind::UsesApi, kExecute), Rule::Action::Color,
                                         "red,colorscheme=set312"}}},
            "uses-API? listing");
  auto p2 = parse_predicates(kCondListing);
  c.require(p2 == PredicateProgram{{Rule{leaf(Matcher::Kind::UsesApi, kExecute), Rule::Action::Color,
                                         "red,colorscheme=set312"},
                                    Rule{leaf(Matcher::Kind::UsesName,
                                              "org/ucomb/android/testinterface/RectanglePlus/getArea"),
                                         Rule::Action::Color, "8,colorscheme=set312"}}},
            "cond listing");
  auto p3 = parse_predicates(kTruncateListing);
  c.require(p3 == PredicateProgram{{Rule{leaf(Matcher::Kind::UsesApi, kExecute), Rule::Action::Truncate,
                                         "12,colorscheme=set312"}}},
            "truncate? listing");

  auto ct = t::load_corpus("http_client.oobc");
  auto o = t::options_for(0, true);
  o.predicates = std::make_shared<const PredicateProgram>(p1);
  auto r = t::analyze(*ct, o);
  auto verdicts = compute_verdicts(r, o.predicates.get());
  std::string dot = export_dot(r, verdicts);
  Json json = export_json_value(r, verdicts);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < r.graph.nodes.size(); ++i) {
    const auto& n = r.graph.nodes[i];
    const Stmt* s = head(*ct, n.config.code);
    bool is_call = s && s->is<stmt::Invoke>() && s->as<stmt::Invoke>()->qualified() == kExecute;
    bool colored = verdicts[i].color == "red,colorscheme=set312";
    c.require(is_call == colored, "verdict on " + n.id);
    if (!is_call) continue;
    ++matched;
    auto line = dot.find("\n  " + n.id + " [");
    auto end = dot.find('\n', line + 1);
    std::string node_line = line == std::string::npos ? "" : dot.substr(line, end - line);
    c.require(node_line.find("fillcolor=\"red\"") != std::string::npos &&
                  node_line.find("colorscheme=set312") != std::string::npos,
              "DOT node lacks the color");
    c.require(json["nodes"][i]["verdict"]["color"] == "red,colorscheme=set312", "JSON node lacks the color");
  }
  c.require(matched == 1, "expected one execute state, found " + std::to_string(matched));

  auto plain = t::analyze(*ct, t::options_for(0, true));
  o.predicates = std::make_shared<const PredicateProgram>(p3);
  auto cut = t::analyze(*ct, o);
  c.require(cut.graph.nodes.size() < plain.graph.nodes.size(), "truncate run is not smaller");
  c.require(cut.incomplete(), "truncate run not flagged incomplete");
  return c.done("3 listings parsed; colored in DOT and JSON; truncation " + std::to_string(plain.graph.nodes.size()) +
                " -> " + std::to_string(cut.graph.nodes.size()) + " nodes");
}

Outcome permission_report_check() {
  Check c;
  auto ct = t::load_corpus("permission_one_call.oobc");
  auto r = t::analyze(*ct, t::options_for(0, true));
  auto pm = parse_permission_map(std::string(kExecute) +
                                 "\tandroid.permission.INTERNET\n"
                                 "android/provider/ContactsContract/query\tandroid.permission.READ_CONTACTS\n");
  auto count = [](const std::vector<PermissionFinding>& f, PermissionFinding::Kind k) {
    return std::count_if(f.begin(), f.end(), [k](const PermissionFinding& x) { return x.kind == k; });
  };
  auto over = permission_report(r, {"android.permission.INTERNET", "android.permission.READ_CONTACTS"}, pm);
  c.require(count(over, PermissionFinding::Kind::UnusedPermission) == 1 &&
                count(over, PermissionFinding::Kind::MissingPermission) == 0,
            "over-declared manifest");
  auto under = permission_report(r, {}, pm);
  c.require(count(under, PermissionFinding::Kind::UnusedPermission) == 0 &&
                count(under, PermissionFinding::Kind::MissingPermission) == 1,
            "under-declared manifest");
  c.require(!under.empty() && under[0].state.has_value(), "missing permission lacks a witness");
  return c.done("1 unused / 0 missing, and 0 unused / 1 missing");
}

Outcome determinism() {
  Check c;
  auto preds = std::make_shared<const PredicateProgram>(parse_predicates(kCondListing));
  std::size_t compared = 0;
  for (const auto& name : t::corpus_names()) {
    auto ct = t::load_corpus(name);
    for (bool widen : {true, false}) {
      auto o = t::options_for(1, widen);
      o.predicates = preds;
      auto render = [&](int workers) {
        o.workers = workers;
        auto r = t::analyze(*ct, o);
        auto v = compute_verdicts(r, preds.get());
        return std::pair{export_dot(r, v), export_json(r, v)};
      };
      auto first = render(1);
      for (int run = 0; run < 4; ++run) c.require(render(1) == first, name + " differs between runs");
      for (int workers : {2, 4, 0}) c.require(render(workers) == first, name + " differs with more workers");
      compared += 8;
    }
  }
  return c.done(std::to_string(compared) + " renderings byte-identical (5 runs, 1/2/4/all workers)");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"soundness", soundness},
      {"termination", termination},
      {"lattice-laws", lattice_laws},
      {"reflection-transparency", reflection_transparency},
      {"multi-entry-widening", multi_entry},
      {"predicate-fidelity", predicate_fidelity},
      {"permission-report", permission_report_check},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
