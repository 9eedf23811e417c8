#include "oobc/predicates.hpp"

#include <algorithm>
#include <cctype>

namespace oobc {

PredicateError::PredicateError(SourcePos pos, const std::string& message)
    : std::runtime_error(to_string(pos) + ": " + message), pos_(pos) {}

namespace {

// API names in the wild carry stray spaces ("testinterface /RectanglePlus");
// qualified names never contain whitespace, so it is dropped.
std::string normalize_name(std::string_view raw) {
  std::string out;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

[[noreturn]] void fail(const SExpr& e, const std::string& msg) { throw PredicateError(e.pos, msg); }

std::string name_arg(const SExpr& e) {
  if (!e.is_string()) fail(e, "expected a quoted method name");
  std::string n = normalize_name(e.text);
  if (n.empty()) fail(e, "empty method name");
  return n;
}

std::string color_arg(const SExpr& e) {
  if (!e.is_string()) fail(e, "expected a color string");
  if (e.text.empty()) fail(e, "empty color");
  return e.text;
}

bool is_false(const SExpr& e) { return e.is_symbol("#f") || e.is_symbol("false"); }

struct TestParser {
  std::string param;  // the lambda's state parameter
  bool truncates = false;

  Matcher parse(const SExpr& e) {
    auto h = e.head();
    if (h == "and" || h == "or") {
      Matcher m{h == "and" ? Matcher::Kind::And : Matcher::Kind::Or, {}, {}};
      for (std::size_t i = 1; i < e.items.size(); ++i) m.children.push_back(parse(e.items[i]));
      return m;
    }
    if (h == "not") {
      if (e.items.size() != 2) fail(e, "not takes one test");
      return Matcher{Matcher::Kind::Not, {}, {parse(e.items[1])}};
    }
    if (h == "uses-API?" || h == "uses-name?" || h == "truncate?") {
      if (e.items.size() < 3 || e.items.size() > 4) fail(e, std::string(h) + " takes a state and a name");
      if (!e.items[1].is_symbol(param)) fail(e.items[1], "expected the state parameter " + param);
      if (e.items.size() == 4 && !e.items[3].is_symbol("st-attr")) fail(e.items[3], "unexpected argument");
      if (h == "truncate?") truncates = true;
      return Matcher{h == "uses-name?" ? Matcher::Kind::UsesName : Matcher::Kind::UsesApi, name_arg(e.items[2]), {}};
    }
    if (e.is_list() && !h.empty()) fail(e, "unknown primitive " + std::string(h));
    fail(e, "expected a predicate test");
  }
};

Matcher parse_core_matcher(const SExpr& e) {
  auto h = e.head();
  if (h == "uses-api" || h == "uses-name") {
    if (e.items.size() != 2) fail(e, std::string(h) + " takes one name");
    return Matcher{h == "uses-api" ? Matcher::Kind::UsesApi : Matcher::Kind::UsesName, name_arg(e.items[1]), {}};
  }
  if (h == "and" || h == "or") {
    Matcher m{h == "and" ? Matcher::Kind::And : Matcher::Kind::Or, {}, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) m.children.push_back(parse_core_matcher(e.items[i]));
    return m;
  }
  if (h == "not") {
    if (e.items.size() != 2) fail(e, "not takes one matcher");
    return Matcher{Matcher::Kind::Not, {}, {parse_core_matcher(e.items[1])}};
  }
  if (h == "always") return Matcher{};
  if (e.is_list() && !h.empty()) fail(e, "unknown primitive " + std::string(h));
  fail(e, "expected a matcher");
}

// One branch result: a color, or #f for "no verdict".
std::optional<std::string> parse_result(const SExpr& e) {
  if (is_false(e)) return std::nullopt;
  return color_arg(e);
}

void add_rule(PredicateProgram& out, Matcher m, bool truncate, std::optional<std::string> color) {
  if (!color) return;
  out.rules.push_back(Rule{std::move(m), truncate ? Rule::Action::Truncate : Rule::Action::Color, std::move(*color)});
}

void parse_lambda(const SExpr& e, PredicateProgram& out) {
  if (e.items.size() != 3) fail(e, "lambda takes a parameter list and a body");
  const SExpr& params = e.items[1];
  if (!params.is_list() || params.items.size() != 1 || !params.items[0].is_symbol()) {
    fail(params, "lambda takes exactly one state parameter");
  }
  std::string param = params.items[0].text;
  const SExpr& body = e.items[2];
  auto h = body.head();
  if (h == "if") {
    if (body.items.size() != 4) fail(body, "if takes a test and two results");
    TestParser tp{param};
    Matcher m = tp.parse(body.items[1]);
    add_rule(out, m, tp.truncates, parse_result(body.items[2]));
    add_rule(out, Matcher{}, false, parse_result(body.items[3]));
  } else if (h == "cond") {
    for (std::size_t i = 1; i < body.items.size(); ++i) {
      const SExpr& clause = body.items[i];
      if (!clause.is_list() || clause.items.size() != 2) fail(clause, "cond clause takes a test and a result");
      if (clause.items[0].is_symbol("else")) {
        if (i + 1 != body.items.size()) fail(clause, "else must be the last cond clause");
        add_rule(out, Matcher{}, false, parse_result(clause.items[1]));
      } else {
        TestParser tp{param};
        Matcher m = tp.parse(clause.items[0]);
        add_rule(out, std::move(m), tp.truncates, parse_result(clause.items[1]));
      }
    }
  } else {
    fail(body, "lambda body must be if or cond");
  }
}

}  // namespace

PredicateProgram parse_predicates(std::string_view text) {
  PredicateProgram out;
  for (const SExpr& e : read_sexprs(text)) {
    auto h = e.head();
    if (h == "lambda") {
      parse_lambda(e, out);
    } else if (h == "color" || h == "truncate") {
      if (e.items.size() != 3) fail(e, std::string(h) + " takes a matcher and a color");
      out.rules.push_back(Rule{parse_core_matcher(e.items[1]),
                               h == "truncate" ? Rule::Action::Truncate : Rule::Action::Color, color_arg(e.items[2])});
    } else {
      fail(e, h.empty() ? "expected a rule" : "unknown primitive " + std::string(h));
    }
  }
  return out;
}

std::string print_matcher(const Matcher& m) {
  switch (m.kind) {
    case Matcher::Kind::UsesApi: return "(uses-api " + quote_string(m.name) + ")";
    case Matcher::Kind::UsesName: return "(uses-name " + quote_string(m.name) + ")";
    case Matcher::Kind::Always: return "(always)";
    case Matcher::Kind::Not: return "(not " + print_matcher(m.children.at(0)) + ")";
    case Matcher::Kind::And:
    case Matcher::Kind::Or: {
      std::string out = m.kind == Matcher::Kind::And ? "(and" : "(or";
      for (const auto& c : m.children) out += " " + print_matcher(c);
      return out + ")";
    }
  }
  return "";
}

std::string print_predicates(const PredicateProgram& p) {
  std::string out;
  for (const auto& r : p.rules) {
    out += r.action == Rule::Action::Truncate ? "(truncate " : "(color ";
    out += print_matcher(r.matcher) + " " + quote_string(r.color) + ")\n";
  }
  return out;
}

bool uses_api(const ClassTable& ct, const StateView& s, std::string_view api) {
  if (const Stmt* h = head(ct, s.config.code)) {
    if (auto inv = h->as<stmt::Invoke>(); inv && inv->qualified() == api) return true;
  }
  return std::any_of(s.events.begin(), s.events.end(), [&](const AnalysisEvent& e) {
    return (e.kind == EventKind::ApiCall || e.kind == EventKind::Resolved) && e.subject == api;
  });
}

bool uses_name(const ClassTable& ct, const StateView& s, std::string_view name) {
  if (s.config.code.method != kNoId && ct.method(s.config.code.method).qualified == name) return true;
  return uses_api(ct, s, name);
}

bool matches(const ClassTable& ct, const Matcher& m, const StateView& s) {
  switch (m.kind) {
    case Matcher::Kind::UsesApi: return uses_api(ct, s, m.name);
    case Matcher::Kind::UsesName: return uses_name(ct, s, m.name);
    case Matcher::Kind::Always: return true;
    case Matcher::Kind::Not: return !matches(ct, m.children.at(0), s);
    case Matcher::Kind::And:
      return std::all_of(m.children.begin(), m.children.end(), [&](const Matcher& c) { return matches(ct, c, s); });
    case Matcher::Kind::Or:
      return std::any_of(m.children.begin(), m.children.end(), [&](const Matcher& c) { return matches(ct, c, s); });
  }
  return false;
}

StateVerdict evaluate(const PredicateProgram& pp, const ClassTable& ct, const StateView& s) {
  for (std::size_t i = 0; i < pp.rules.size(); ++i) {
    const Rule& r = pp.rules[i];
    if (matches(ct, r.matcher, s)) return StateVerdict{r.color, r.action == Rule::Action::Truncate, i};
  }
  return {};
}

}  // namespace oobc
