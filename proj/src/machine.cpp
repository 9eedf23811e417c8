#include "oobc/machine.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "oobc/reflection.hpp"

namespace oobc {

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ApiCall: return "api-call";
    case EventKind::Resolved: return "resolved";
    case EventKind::Allocation: return "allocation";
    case EventKind::Reflection: return "reflection";
    case EventKind::Diagnostic: return "diagnostic";
  }
  return "?";
}

void apply_delta(Store& store, const StoreDelta& delta) {
  for (const auto& [a, v] : delta) store.join_at(a, v);
}

bool apply_delta_changed(Store& store, const StoreDelta& delta) {
  bool changed = false;
  for (const auto& [a, v] : delta) changed |= store.join_at(a, v);
  return changed;
}

FramePointer alloc_fp(const ClassTable& ct, const Config& c, MethodId callee, const AllocationPolicy& policy) {
  return FramePointer{callee, push_context(head_stmt(ct, c.code), c.fp.ctx, policy.depth())};
}

KontAddr alloc_k(const ClassTable& ct, const Config& c, MethodId callee, const AllocationPolicy& policy) {
  StmtId site = head_stmt(ct, c.code);
  return KontAddr{site, callee, push_context(site, c.fp.ctx, policy.depth())};
}

ObjectPointer alloc_op(const ClassTable& ct, const Config& c, const AllocationPolicy& policy) {
  Context ctx = c.fp.ctx;
  if (ctx.size() > policy.depth()) ctx.resize(policy.depth());
  return ObjectPointer{AllocSite::statement(head_stmt(ct, c.code)), std::move(ctx)};
}

AbstractValue default_value(const Type& t) {
  if (t.is_integral()) return {exact_int(0)};
  if (t.kind == Type::Kind::Boolean) return {exact_bool(false)};
  if (t.kind == Type::Kind::Void) return {atom::Void{}};
  return {atom::Null{}};
}

AbstractValue top_value(const Type& t) {
  if (t.is_integral()) return {top_int()};
  if (t.kind == Type::Kind::Boolean) return {top_bool()};
  if (t.kind == Type::Kind::Void) return {atom::Void{}};
  return {atom::Null{}};
}

StoreDelta init_object(const ClassTable& ct, const ObjectPointer& op, ClassId cls) {
  StoreDelta out;
  for (const FieldDef* f : ct.all_fields(cls)) out.emplace_back(FieldAddr{op, f->name}, default_value(f->type));
  return out;
}

AbstractState inject(const ClassTable& ct, MethodId entry) {
  (void)ct;
  auto store = std::make_shared<Store>();
  store->join_at(KontAddr::initial(), AbstractValue{atom::Halt{}});
  return AbstractState{Config{Code::at(entry), FramePointer::initial(), KontAddr::initial()}, std::move(store)};
}

AbstractState entry_state(const ClassTable& ct, MethodId entry) {
  AbstractState s = inject(ct, entry);
  auto store = std::make_shared<Store>(s.sigma());
  const MethodInfo& m = ct.method(entry);
  if (!m.def->is_static()) {
    ObjectPointer op{AllocSite::entry_receiver(m.owner), {}};
    store->join_at(RegAddr{FramePointer::initial(), std::string(kThisRegister)},
                   AbstractValue{atom::Object{op, m.owner}});
    apply_delta(*store, init_object(ct, op, m.owner));
  }
  for (std::size_t i = 0; i < m.def->params.size(); ++i) {
    store->join_at(RegAddr{FramePointer::initial(), param_register(i)}, default_value(m.def->params[i]));
  }
  s.store = std::move(store);
  return s;
}

namespace {

void note(std::vector<AnalysisEvent>* events, StmtId site, std::string msg) {
  if (events) events->push_back(AnalysisEvent{EventKind::Diagnostic, site, std::move(msg)});
}

std::optional<std::int64_t> wrap_arith(AtomicOp op, std::int64_t a, std::int64_t b) {
  auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case AtomicOp::Add: return static_cast<std::int64_t>(ua + ub);
    case AtomicOp::Sub: return static_cast<std::int64_t>(ua - ub);
    case AtomicOp::Mul: return static_cast<std::int64_t>(ua * ub);
    case AtomicOp::Div:
      if (b == 0) return std::nullopt;
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
    default: return std::nullopt;
  }
}

template <class T>
const T* as(const Atom& a) {
  return std::get_if<T>(&a);
}

// Result of a binary op on one pair of atoms; nullopt when undefined.
std::optional<Atom> binop(AtomicOp op, const Atom& x, const Atom& y) {
  switch (op) {
    case AtomicOp::Add:
    case AtomicOp::Sub:
    case AtomicOp::Mul:
    case AtomicOp::Div: {
      auto a = as<atom::Int>(x), b = as<atom::Int>(y);
      if (!a || !b) return std::nullopt;
      if (op == AtomicOp::Div && b->value && *b->value == 0) return std::nullopt;
      if (a->is_top() || b->is_top()) return top_int();
      if (auto r = wrap_arith(op, *a->value, *b->value)) return exact_int(*r);
      return std::nullopt;
    }
    case AtomicOp::Lt:
    case AtomicOp::Gt: {
      auto a = as<atom::Int>(x), b = as<atom::Int>(y);
      if (!a || !b) return std::nullopt;
      if (a->is_top() || b->is_top()) return top_bool();
      return exact_bool(op == AtomicOp::Lt ? *a->value < *b->value : *a->value > *b->value);
    }
    case AtomicOp::And:
    case AtomicOp::Or: {
      auto a = as<atom::Bool>(x), b = as<atom::Bool>(y);
      if (!a || !b) return std::nullopt;
      bool absorbing = op == AtomicOp::Or;  // true absorbs `or`, false absorbs `and`
      if (a->value == absorbing || b->value == absorbing) return exact_bool(absorbing);
      if (a->is_top() || b->is_top()) return top_bool();
      return exact_bool(!absorbing);
    }
    case AtomicOp::Eq: {
      if (x.index() != y.index()) return exact_bool(false);
      if (auto a = as<atom::Int>(x)) {
        auto b = as<atom::Int>(y);
        if (a->is_top() || b->is_top()) return top_bool();
        return exact_bool(*a->value == *b->value);
      }
      if (auto a = as<atom::Bool>(x)) {
        auto b = as<atom::Bool>(y);
        if (a->is_top() || b->is_top()) return top_bool();
        return exact_bool(*a->value == *b->value);
      }
      if (auto a = as<atom::Str>(x)) {
        auto b = as<atom::Str>(y);
        if (a->is_top() || b->is_top()) return top_bool();
        return exact_bool(*a->value == *b->value);
      }
      if (auto a = as<atom::Object>(x)) {
        // Distinct abstract pointers never denote the same concrete object.
        auto b = as<atom::Object>(y);
        if (a->ptr != b->ptr || a->cls != b->cls) return exact_bool(false);
        return top_bool();
      }
      if (auto a = as<atom::Method>(x)) return exact_bool(a->method == as<atom::Method>(y)->method);
      if (std::holds_alternative<atom::Null>(x) || std::holds_alternative<atom::Void>(x)) return exact_bool(true);
      return top_bool();
    }
    case AtomicOp::Not: break;
  }
  return std::nullopt;
}

std::optional<Atom> unop_not(const Atom& x) {
  auto a = as<atom::Bool>(x);
  if (!a) return std::nullopt;
  if (a->is_top()) return top_bool();
  return exact_bool(!*a->value);
}

}  // namespace

AbstractValue eval_atomic(const ClassTable& ct, const AExp& e, const FramePointer& fp, const Store& store,
                          std::vector<AnalysisEvent>* events, StmtId site) {
  switch (e.kind) {
    case AExpKind::True: return {exact_bool(true)};
    case AExpKind::False: return {exact_bool(false)};
    case AExpKind::Null: return {atom::Null{}};
    case AExpKind::Void: return {atom::Void{}};
    case AExpKind::Int: return {exact_int(e.number)};
    case AExpKind::This:
    case AExpKind::Register: {
      std::string name = e.kind == AExpKind::This ? std::string(kThisRegister) : e.name;
      const AbstractValue& v = store.lookup(RegAddr{fp, name});
      if (v.empty()) note(events, site, "unbound register " + name);
      return v;
    }
    case AExpKind::Op: {
      std::vector<AbstractValue> args;
      for (const auto& o : e.operands) args.push_back(eval_atomic(ct, o, fp, store, events, site));
      AbstractValue out;
      if (e.op == AtomicOp::Not) {
        for (const auto& x : args.at(0))
          if (auto r = unop_not(x)) out.insert(*r);
        return out;
      }
      for (const auto& x : args.at(0))
        for (const auto& y : args.at(1))
          if (auto r = binop(e.op, x, y)) out.insert(*r);
      return out;
    }
    case AExpKind::InstanceOf: {
      AbstractValue operand = eval_atomic(ct, e.operands.at(0), fp, store, events, site);
      auto target = ct.find_class(e.name);
      AbstractValue out;
      for (const auto& x : operand) {
        auto obj = as<atom::Object>(x);
        out.insert(exact_bool(obj && target && ct.is_subclass(obj->cls, *target)));
      }
      return out;
    }
  }
  return {};
}

AbstractValue eval_field(const ClassTable& ct, const AExp& object, const FramePointer& fp, const Store& store,
                         const std::string& field, std::vector<AnalysisEvent>* events, StmtId site) {
  AbstractValue base = eval_atomic(ct, object, fp, store, events, site);
  AbstractValue out;
  bool any_object = false;
  for (const auto& x : base) {
    if (auto obj = as<atom::Object>(x)) {
      any_object = true;
      out.join(store.lookup(FieldAddr{obj->ptr, field}));
    } else {
      note(events, site, "field read ." + field + " on a non-object value");
    }
  }
  if (!any_object) note(events, site, "field read ." + field + " has no object to read from");
  return out;
}

Successor apply_method(const ClassTable& ct, MethodId m, const std::optional<AbstractValue>& receiver,
                       const std::vector<AbstractValue>& params, const Config& c, const AllocationPolicy& policy) {
  FramePointer fp2 = alloc_fp(ct, c, m, policy);
  KontAddr ka2 = alloc_k(ct, c, m, policy);
  Successor out{Config{Code::at(m), fp2, ka2}, {}, "invoke"};
  out.delta.emplace_back(ka2, AbstractValue{atom::Fun{c.fp, advance(ct, c.code), c.ka}});
  if (receiver) out.delta.emplace_back(RegAddr{fp2, std::string(kThisRegister)}, *receiver);
  for (std::size_t i = 0; i < params.size(); ++i) out.delta.emplace_back(RegAddr{fp2, param_register(i)}, params[i]);
  return out;
}

std::optional<Successor> apply_method(const ClassTable& ct, MethodId m, const std::vector<AExp>& args,
                                      const Config& c, const Store& store, const AllocationPolicy& policy,
                                      std::vector<AnalysisEvent>* events) {
  const MethodDef& def = *ct.method(m).def;
  StmtId site = head_stmt(ct, c.code);
  std::size_t expected = def.params.size() + (def.is_static() ? 0 : 1);
  if (args.size() != expected) {
    note(events, site, "arity mismatch calling " + ct.method(m).qualified);
    return std::nullopt;
  }
  std::vector<AbstractValue> values;
  for (const auto& a : args) values.push_back(eval_atomic(ct, a, c.fp, store, events, site));
  std::optional<AbstractValue> receiver;
  if (!def.is_static()) {
    receiver = values.front();
    values.erase(values.begin());
  }
  return apply_method(ct, m, receiver, values, c, policy);
}

AbstractValue StepContext::eval(const AExp& e) const {
  return eval_atomic(ct, e, config.fp, store, &out.events, site);
}

void StepContext::diagnose(std::string message) const { emit(EventKind::Diagnostic, std::move(message)); }

void StepContext::emit(EventKind kind, std::string subject) const {
  out.events.push_back(AnalysisEvent{kind, site, std::move(subject)});
}

void StepContext::add(Config next, StoreDelta delta, std::string rule) const {
  out.successors.push_back(Successor{std::move(next), std::move(delta), std::move(rule)});
}

bool StepContext::dispatch(MethodId m, const std::vector<AbstractValue>& args,
                           const std::optional<AbstractValue>& receiver_override) const {
  const MethodInfo& info = ct.method(m);
  const MethodDef& def = *info.def;
  std::vector<AbstractValue> params = args;
  std::optional<AbstractValue> receiver;
  if (!def.is_static()) {
    if (params.empty()) {
      diagnose("arity mismatch calling " + info.qualified);
      return false;
    }
    receiver = receiver_override ? *receiver_override : params.front();
    params.erase(params.begin());
  }
  if (params.size() != def.params.size()) {
    diagnose("arity mismatch calling " + info.qualified);
    return false;
  }
  emit(EventKind::Resolved, info.qualified);
  if (ct.is_library(info.owner)) emit(EventKind::ApiCall, info.qualified);
  Successor s = apply_method(ct, m, receiver, params, config, policy);
  out.successors.push_back(std::move(s));
  return true;
}

namespace {

struct Rules {
  const StepContext& cx;

  Code jump(const std::string& label) const {
    const MethodInfo& m = cx.ct.method(cx.config.code.method);
    return Code::at(m.id, static_cast<std::uint32_t>(m.labels.position(label)));
  }

  void advance_only() const { cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, {}, "advance"); }

  void operator()(const stmt::Label&) const { advance_only(); }
  void operator()(const stmt::Nop&) const { advance_only(); }
  void operator()(const stmt::Line&) const { advance_only(); }

  void operator()(const stmt::Goto& s) const { cx.add(Config{jump(s.label), cx.config.fp, cx.config.ka}, {}, "goto"); }

  void operator()(const stmt::If& s) const {
    AbstractValue guard = cx.eval(s.condition);
    bool may_true = false, may_false = false, other = guard.empty();
    for (const auto& a : guard) {
      if (auto b = as<atom::Bool>(a)) {
        if (!b->value || *b->value) may_true = true;
        if (!b->value || !*b->value) may_false = true;
      } else {
        other = true;
      }
    }
    if (other) {
      cx.diagnose("branch guard is not a definite boolean");
      may_true = may_false = true;
    }
    if (may_true) cx.add(Config{jump(s.label), cx.config.fp, cx.config.ka}, {}, "if-taken");
    if (may_false) cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, {}, "if-fallthrough");
  }

  void operator()(const stmt::Assign& s) const {
    cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, {{cx.reg(s.dest), cx.eval(s.value)}}, "assign");
  }

  void operator()(const stmt::New& s) const {
    ClassId cls = *cx.ct.find_class(s.class_name);
    ObjectPointer op = alloc_op(cx.ct, cx.config, cx.policy);
    StoreDelta delta{{cx.reg(s.dest), AbstractValue{atom::Object{op, cls}}}};
    for (auto& b : init_object(cx.ct, op, cls)) delta.push_back(std::move(b));
    cx.emit(EventKind::Allocation, s.class_name);
    cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, std::move(delta), "new");
  }

  void operator()(const stmt::FieldGet& s) const {
    AbstractValue v = eval_field(cx.ct, s.object, cx.config.fp, cx.store, s.field, &cx.out.events, cx.site);
    cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, {{cx.reg(s.dest), std::move(v)}}, "field-get");
  }

  void operator()(const stmt::FieldPut& s) const {
    AbstractValue objects = cx.eval(s.object);
    AbstractValue value = cx.eval(s.value);
    StoreDelta delta;
    for (const auto& a : objects) {
      if (auto obj = as<atom::Object>(a)) {
        delta.emplace_back(FieldAddr{obj->ptr, s.field}, value);
      } else {
        cx.diagnose("field write ." + s.field + " on a non-object value");
      }
    }
    cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, std::move(delta), "field-put");
  }

  void operator()(const stmt::ConstString& s) const { step_const_string(cx, s); }

  void operator()(const stmt::Invoke& s) const {
    if (intercept_reflection(cx, s)) return;
    std::vector<AbstractValue> args;
    for (const auto& a : s.args) args.push_back(cx.eval(a));
    switch (s.kind) {
      case InvokeKind::Static:
      case InvokeKind::Direct: dispatch_named(s, s.class_name, args); break;
      case InvokeKind::Super: {
        MethodId enclosing = cx.config.code.prelude != kNoId ? kNoId : cx.config.code.method;
        ClassId owner = enclosing == kNoId ? cx.config.code.prelude : cx.ct.method(enclosing).owner;
        ClassId super = cx.ct.cls(owner).superclass;
        if (super == kNoId) {
          cx.diagnose("invoke-super from the root class");
          return;
        }
        dispatch_named(s, cx.ct.cls(super).name, args);
        break;
      }
      case InvokeKind::Virtual:
      case InvokeKind::Interface: dispatch_virtual(s, args); break;
    }
  }

  void dispatch_named(const stmt::Invoke& s, const std::string& cls_name, const std::vector<AbstractValue>& args) const {
    auto cls = cx.ct.find_class(cls_name);
    if (!cls) {
      cx.diagnose("unknown class " + cls_name + " at call to " + s.qualified());
      return;
    }
    try {
      cx.dispatch(cx.ct.resolve_method(*cls, s.method_name), args, std::nullopt);
    } catch (const ResolveError& err) {
      cx.diagnose(err.what());
    }
  }

  void dispatch_virtual(const stmt::Invoke& s, const std::vector<AbstractValue>& args) const {
    if (args.empty()) {
      cx.diagnose("virtual call to " + s.qualified() + " without a receiver");
      return;
    }
    std::map<MethodId, AbstractValue> groups;
    for (const auto& a : args.front()) {
      auto obj = as<atom::Object>(a);
      if (!obj) {
        cx.diagnose(std::holds_alternative<atom::Null>(a) ? "null receiver at call to " + s.qualified()
                                                          : "non-object receiver at call to " + s.qualified());
        continue;
      }
      try {
        groups[cx.ct.resolve_method(obj->cls, s.method_name)].insert(a);
      } catch (const ResolveError& err) {
        cx.diagnose(err.what());
      }
    }
    for (const auto& [m, receivers] : groups) cx.dispatch(m, args, receivers);
  }

  void operator()(const stmt::Return& s) const {
    AbstractValue value = cx.eval(s.value);
    const AbstractValue& konts = cx.store.lookup(cx.config.ka);
    if (konts.empty()) {
      cx.diagnose("return with an empty continuation set");
      return;
    }
    for (const auto& k : konts) {
      if (auto f = as<atom::Fun>(k)) {
        StoreDelta delta{{RegAddr{f->fp, std::string(kReturnRegister)}, value}};
        StmtId call = call_before(cx.ct, f->resume);
        if (call != kNoId) {
          if (auto inv = cx.ct.statement(call).stmt->as<stmt::Invoke>(); inv && inv->dest) {
            delta.emplace_back(RegAddr{f->fp, *inv->dest}, value);
          }
        }
        cx.add(Config{f->resume, f->fp, f->next}, std::move(delta), "return");
      } else if (std::holds_alternative<atom::Halt>(k)) {
        cx.add(Config{Code::halted(), cx.config.fp, cx.config.ka},
               {{RegAddr{cx.config.fp, std::string(kReturnRegister)}, value}}, "halt");
      } else {
        cx.diagnose("non-continuation value at a continuation address");
      }
    }
  }
};

}  // namespace

Transition transition(const ClassTable& ct, const Config& c, const Store& store, const AllocationPolicy& policy) {
  Transition out;
  if (c.code.is_halted()) return out;
  StmtId site = head_stmt(ct, c.code);
  StepContext cx(ct, c, store, policy, site, out);
  if (site == kNoId) {
    cx.diagnose("control fell off the end of " + ct.method(c.code.method).qualified);
    return out;
  }
  std::visit(Rules{cx}, ct.statement(site).stmt->node);
  return out;
}

StepResult step(const ClassTable& ct, const AbstractState& state, const AllocationPolicy& policy) {
  Transition t = transition(ct, state.config, state.sigma(), policy);
  StepResult out;
  out.events = std::move(t.events);
  for (auto& s : t.successors) {
    auto store = std::make_shared<Store>(state.sigma());
    apply_delta(*store, s.delta);
    out.successors.push_back(AbstractState{std::move(s.config), std::move(store)});
  }
  std::sort(out.successors.begin(), out.successors.end());
  out.successors.erase(std::unique(out.successors.begin(), out.successors.end()), out.successors.end());
  return out;
}

}  // namespace oobc
