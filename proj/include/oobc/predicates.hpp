#pragma once

// Analyst predicates over abstract states. A predicate file is a list of
// rules; the first rule whose matcher holds decides the state's color and
// whether exploration stops there.
//
// Accepted surface forms:
//   (lambda (state) (if TEST "color" #f))
//   (lambda (state) (cond [TEST "color"] ... [else #f]))
//   (color MATCHER "color")      (truncate MATCHER "color")
// where TEST is (uses-API? state "C/m" [st-attr]), (uses-name? state "C/m"),
// (truncate? state "C/m") or an and/or/not of tests, and MATCHER is
// (uses-api "C/m"), (uses-name "C/m") or an and/or/not of matchers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oobc/machine.hpp"
#include "oobc/sexpr.hpp"

namespace oobc {

struct Matcher {
  enum class Kind { UsesApi, UsesName, And, Or, Not, Always };

  Kind kind = Kind::Always;
  std::string name;
  std::vector<Matcher> children;

  bool operator==(const Matcher&) const = default;
};

struct Rule {
  enum class Action { Color, Truncate };

  Matcher matcher;
  Action action = Action::Color;
  std::string color;

  bool operator==(const Rule&) const = default;
};

struct PredicateProgram {
  std::vector<Rule> rules;
  bool empty() const { return rules.empty(); }
  bool operator==(const PredicateProgram&) const = default;
};

struct StateVerdict {
  std::optional<std::string> color;
  bool truncated = false;
  std::optional<std::size_t> rule;

  bool operator==(const StateVerdict&) const = default;
};

class PredicateError : public std::runtime_error {
 public:
  PredicateError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

// Throws SyntaxError for malformed text, PredicateError otherwise.
PredicateProgram parse_predicates(std::string_view text);

std::string print_matcher(const Matcher& m);
// Declarative-core rendering; parse_predicates reads it back unchanged.
std::string print_predicates(const PredicateProgram& p);

// What a predicate can observe about a state: its configuration and the
// events its step emitted.
struct StateView {
  const Config& config;
  const std::vector<AnalysisEvent>& events;
};

// Head statement invokes `api`, by static name or by a resolved target
// (reflective calls included through their api-call events).
bool uses_api(const ClassTable& ct, const StateView& s, std::string_view api);
// Code lies in the body of `name`, or the head statement calls it.
bool uses_name(const ClassTable& ct, const StateView& s, std::string_view name);

bool matches(const ClassTable& ct, const Matcher& m, const StateView& s);
StateVerdict evaluate(const PredicateProgram& pp, const ClassTable& ct, const StateView& s);

}  // namespace oobc
