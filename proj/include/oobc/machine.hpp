#pragma once

// The abstract transition relation: one step from a configuration and a
// store to successor configurations, each paired with the store bindings
// it joins in. Stepping never mutates the input store; the caller decides
// whether deltas go into a per-state copy or a shared widened store.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oobc/domain.hpp"

namespace oobc {

struct AllocationPolicy {
  enum class Mode { ContextSensitive, Monovariant };

  std::size_t k = 0;
  Mode mode = Mode::ContextSensitive;

  static AllocationPolicy with_k(std::size_t k) { return {k, Mode::ContextSensitive}; }
  static AllocationPolicy monovariant() { return {0, Mode::Monovariant}; }
  std::size_t depth() const { return mode == Mode::Monovariant ? 0 : k; }
};

enum class EventKind { ApiCall, Resolved, Allocation, Reflection, Diagnostic };

std::string_view event_kind_name(EventKind k);

struct AnalysisEvent {
  EventKind kind = EventKind::Diagnostic;
  StmtId site = kNoId;
  std::string subject;  // API or method name, class name, or diagnostic text
  auto operator<=>(const AnalysisEvent&) const = default;
};

using StoreDelta = std::vector<std::pair<Addr, AbstractValue>>;

void apply_delta(Store& store, const StoreDelta& delta);
bool apply_delta_changed(Store& store, const StoreDelta& delta);

struct Successor {
  Config config;
  StoreDelta delta;
  std::string rule;
};

struct Transition {
  std::vector<Successor> successors;
  std::vector<AnalysisEvent> events;
};

// Full successor states with materialized stores.
struct StepResult {
  std::vector<AbstractState> successors;  // sorted, duplicate-free
  std::vector<AnalysisEvent> events;
};

// Allocators. Each is a function of the state's head statement, the
// context recorded in its frame pointer, and the policy's depth k.
FramePointer alloc_fp(const ClassTable& ct, const Config& c, MethodId callee, const AllocationPolicy& policy);
KontAddr alloc_k(const ClassTable& ct, const Config& c, MethodId callee, const AllocationPolicy& policy);
ObjectPointer alloc_op(const ClassTable& ct, const Config& c, const AllocationPolicy& policy);

AbstractValue default_value(const Type& t);
// Least value covering any runtime value of the type in this language.
AbstractValue top_value(const Type& t);

// Field bindings for a freshly allocated object: every field declared on
// the class and its ancestors, set to its type's default.
StoreDelta init_object(const ClassTable& ct, const ObjectPointer& op, ClassId cls);

// (body, fp0, [ka0 -> halt], ka0)
AbstractState inject(const ClassTable& ct, MethodId entry);

// inject plus the entry's receiver (a per-class object) and parameter
// defaults, so entry methods start with every register they read bound.
AbstractState entry_state(const ClassTable& ct, MethodId entry);

AbstractValue eval_atomic(const ClassTable& ct, const AExp& e, const FramePointer& fp, const Store& store,
                          std::vector<AnalysisEvent>* events = nullptr, StmtId site = kNoId);

AbstractValue eval_field(const ClassTable& ct, const AExp& object, const FramePointer& fp, const Store& store,
                         const std::string& field, std::vector<AnalysisEvent>* events = nullptr,
                         StmtId site = kNoId);

// Invocation of `m` from configuration `c` (whose head is the call):
// continuation stored at the new kont address, receiver bound to `this`,
// parameters bound to p0..pn in the new frame.
Successor apply_method(const ClassTable& ct, MethodId m, const std::optional<AbstractValue>& receiver,
                       const std::vector<AbstractValue>& params, const Config& c, const AllocationPolicy& policy);

// Same, evaluating argument expressions in the caller's frame. For an
// instance method args[0] is the receiver. Returns nullopt on arity
// mismatch.
std::optional<Successor> apply_method(const ClassTable& ct, MethodId m, const std::vector<AExp>& args,
                                      const Config& c, const Store& store, const AllocationPolicy& policy,
                                      std::vector<AnalysisEvent>* events = nullptr);

Transition transition(const ClassTable& ct, const Config& c, const Store& store, const AllocationPolicy& policy);

StepResult step(const ClassTable& ct, const AbstractState& state, const AllocationPolicy& policy);

// Shared by the transition rules and the reflection interceptors.
class StepContext {
 public:
  StepContext(const ClassTable& ct, const Config& c, const Store& store, const AllocationPolicy& policy,
              StmtId site, Transition& out)
      : ct(ct), config(c), store(store), policy(policy), site(site), out(out) {}

  const ClassTable& ct;
  const Config& config;
  const Store& store;
  const AllocationPolicy& policy;
  StmtId site;
  Transition& out;

  AbstractValue eval(const AExp& e) const;
  void diagnose(std::string message) const;
  void emit(EventKind kind, std::string subject) const;
  Code next_code() const { return advance(ct, config.code); }
  RegAddr reg(const std::string& name) const { return RegAddr{config.fp, name}; }
  void add(Config next, StoreDelta delta, std::string rule) const;
  // Resolves, records events, checks arity and applies; false on failure.
  bool dispatch(MethodId m, const std::vector<AbstractValue>& args,
                const std::optional<AbstractValue>& receiver_override) const;
};

}  // namespace oobc
