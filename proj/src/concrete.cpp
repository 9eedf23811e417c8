#include "oobc/concrete.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "oobc/reflection.hpp"

namespace oobc::concrete {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Halted: return "halted";
    case Termination::Error: return "error";
    case Termination::FuelExhausted: return "fuel-exhausted";
  }
  return "?";
}

namespace {

struct Fault {
  std::string message;
};

[[noreturn]] void fault(std::string msg) { throw Fault{std::move(msg)}; }

Value default_of(const Type& t) {
  if (t.is_integral()) return std::int64_t{0};
  if (t.kind == Type::Kind::Boolean) return false;
  if (t.kind == Type::Kind::Void) return value::Void{};
  return value::Null{};
}

class Interpreter {
 public:
  Interpreter(const ClassTable& ct, Allocations& allocs) : ct_(ct), allocs_(allocs) {}

  Trace run(MethodId entry, std::size_t fuel) {
    Trace trace;
    trace.entry = entry;
    start(entry);
    trace.states.push_back(snapshot());
    for (std::size_t used = 0;; ++used) {
      if (code_.is_halted()) {
        trace.termination = Termination::Halted;
        break;
      }
      if (used >= fuel) {
        trace.termination = Termination::FuelExhausted;
        break;
      }
      try {
        step();
      } catch (const Fault& f) {
        trace.termination = Termination::Error;
        trace.error = f.message;
        break;
      }
      trace.states.push_back(snapshot());
    }
    return trace;
  }

 private:
  const ClassTable& ct_;
  Allocations& allocs_;
  Heap heap_;
  Id next_ = 1;
  std::map<ClassId, Id> receivers_;
  Code code_;
  Id fp_ = 0;
  Id ka_ = 0;

  ConcreteState snapshot() const { return ConcreteState{code_, fp_, ka_, std::make_shared<const Heap>(heap_)}; }

  const Context& history() const { return allocs_.frames.at(fp_).history; }

  Id new_object(AllocSite site, ClassId cls, Context hist) {
    Id id = next_++;
    allocs_.objects[id] = ObjectInfo{site, std::move(hist)};
    for (const FieldDef* f : ct_.all_fields(cls)) heap_[Field{id, f->name}] = default_of(f->type);
    return id;
  }

  void start(MethodId entry) {
    const MethodInfo& m = ct_.method(entry);
    fp_ = next_++;
    allocs_.frames[fp_] = FrameInfo{true, kNoId, {}};
    ka_ = next_++;
    allocs_.konts[ka_] = KontInfo{true, kNoId, kNoId, {}};
    heap_[Kont{ka_}] = value::Halt{};
    if (!m.def->is_static()) {
      auto it = receivers_.find(m.owner);
      if (it == receivers_.end()) {
        it = receivers_.emplace(m.owner, new_object(AllocSite::entry_receiver(m.owner), m.owner, {})).first;
      }
      heap_[Reg{fp_, std::string(kThisRegister)}] = value::Ref{it->second, m.owner};
    }
    for (std::size_t i = 0; i < m.def->params.size(); ++i) heap_[Reg{fp_, param_register(i)}] = default_of(m.def->params[i]);
    code_ = Code::at(entry);
  }

  const Value& load(const Address& a, const std::string& what) const {
    auto it = heap_.find(a);
    if (it == heap_.end()) fault("unbound " + what);
    return it->second;
  }

  void set_reg(const std::string& r, Value v) { heap_[Reg{fp_, r}] = std::move(v); }

  const value::Ref& object(const Value& v, const std::string& what) const {
    auto r = std::get_if<value::Ref>(&v);
    if (!r) fault(what + " is not an object");
    return *r;
  }

  std::int64_t as_int(const Value& v) const {
    auto p = std::get_if<std::int64_t>(&v);
    if (!p) fault("integer operand expected");
    return *p;
  }

  bool as_bool(const Value& v) const {
    auto p = std::get_if<bool>(&v);
    if (!p) fault("boolean operand expected");
    return *p;
  }

  Value eval(const AExp& e) const {
    switch (e.kind) {
      case AExpKind::True: return true;
      case AExpKind::False: return false;
      case AExpKind::Null: return value::Null{};
      case AExpKind::Void: return value::Void{};
      case AExpKind::Int: return e.number;
      case AExpKind::This: return load(Reg{fp_, std::string(kThisRegister)}, "register this");
      case AExpKind::Register: return load(Reg{fp_, e.name}, "register " + e.name);
      case AExpKind::InstanceOf: {
        Value v = eval(e.operands.at(0));
        auto r = std::get_if<value::Ref>(&v);
        auto target = ct_.find_class(e.name);
        return r && target && ct_.is_subclass(r->cls, *target);
      }
      case AExpKind::Op: break;
    }
    if (e.op == AtomicOp::Not) return !as_bool(eval(e.operands.at(0)));
    Value x = eval(e.operands.at(0)), y = eval(e.operands.at(1));
    switch (e.op) {
      case AtomicOp::Add:
      case AtomicOp::Sub:
      case AtomicOp::Mul: {
        auto a = static_cast<std::uint64_t>(as_int(x)), b = static_cast<std::uint64_t>(as_int(y));
        std::uint64_t r = e.op == AtomicOp::Add ? a + b : e.op == AtomicOp::Sub ? a - b : a * b;
        return static_cast<std::int64_t>(r);
      }
      case AtomicOp::Div: {
        std::int64_t a = as_int(x), b = as_int(y);
        if (b == 0) fault("division by zero");
        if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
        return a / b;
      }
      case AtomicOp::Lt: return as_int(x) < as_int(y);
      case AtomicOp::Gt: return as_int(x) > as_int(y);
      case AtomicOp::And: {
        bool a = as_bool(x), b = as_bool(y);
        return a && b;
      }
      case AtomicOp::Or: {
        bool a = as_bool(x), b = as_bool(y);
        return a || b;
      }
      case AtomicOp::Eq:
        if (x.index() != y.index()) return false;
        if (auto a = std::get_if<value::Ref>(&x)) return a->object == std::get<value::Ref>(y).object;
        return x == y;
      case AtomicOp::Not: break;
    }
    fault("bad operator");
  }

  Code label_code(const std::string& label) const {
    const MethodInfo& m = ct_.method(code_.method);
    return Code::at(m.id, static_cast<std::uint32_t>(m.labels.position(label)));
  }

  StmtId site() const { return head_stmt(ct_, code_); }

  void next() { code_ = advance(ct_, code_); }

  std::string string_value(const Value& v, const std::string& what) const {
    const value::Ref& r = object(v, what);
    const Value& s = load(Field{r.object, std::string(kStringValueField)}, what + " contents");
    auto p = std::get_if<std::string>(&s);
    if (!p) fault(what + " is not a string");
    return *p;
  }

  void call(MethodId m, std::optional<Value> receiver, std::vector<Value> params) {
    const MethodInfo& info = ct_.method(m);
    if (params.size() != info.def->params.size()) fault("arity mismatch calling " + info.qualified);
    StmtId s = site();
    Context hist = history();
    hist.insert(hist.begin(), s);
    Id frame = next_++;
    allocs_.frames[frame] = FrameInfo{false, m, hist};
    Id kont = next_++;
    allocs_.konts[kont] = KontInfo{false, s, m, hist};
    heap_[Kont{kont}] = value::Fun{fp_, advance(ct_, code_), ka_};
    if (receiver) heap_[Reg{frame, std::string(kThisRegister)}] = *receiver;
    for (std::size_t i = 0; i < params.size(); ++i) heap_[Reg{frame, param_register(i)}] = params[i];
    fp_ = frame;
    ka_ = kont;
    code_ = Code::at(m);
  }

  // Ordinary dispatch: args[0] is the receiver for instance methods.
  void call_with_args(MethodId m, std::vector<Value> args) {
    std::optional<Value> receiver;
    if (!ct_.method(m).def->is_static()) {
      if (args.empty()) fault("missing receiver");
      receiver = args.front();
      args.erase(args.begin());
    }
    call(m, receiver, std::move(args));
  }

  MethodId resolve(ClassId cls, const std::string& name) const {
    auto m = ct_.try_resolve(cls, name);
    if (!m) fault("cannot resolve " + name + " on " + ct_.cls(cls).name);
    return *m;
  }

  void bind_result(const stmt::Invoke& inv, const Value& v) {
    set_reg(std::string(kReturnRegister), v);
    if (inv.dest) set_reg(*inv.dest, v);
  }

  ClassId class_of_class_object(const Value& v) const {
    const value::Ref& c = object(v, "class object");
    if (c.cls != ct_.class_class()) fault("not a class object");
    std::string name = string_value(load(Field{c.object, std::string(kClassNameField)}, "class name"), "class name");
    std::replace(name.begin(), name.end(), '.', '/');
    auto cls = ct_.find_class(name);
    if (!cls) fault("unknown class " + name);
    return *cls;
  }

  bool reflective(const stmt::Invoke& inv, const std::vector<Value>& args) {
    std::string q = inv.qualified();
    auto arg = [&](std::size_t i) -> const Value& {
      if (i >= args.size()) fault(q + ": missing argument");
      return args[i];
    };
    if (q == kForName) {
      const value::Ref& s = object(arg(0), "forName argument");
      if (s.cls != ct_.string_class()) fault("forName argument is not a string");
      Id c = new_object(AllocSite::statement(site()), ct_.class_class(), history());
      heap_[Field{c, std::string(kClassNameField)}] = s;
      bind_result(inv, value::Ref{c, ct_.class_class()});
      next();
    } else if (q == kGetMethod) {
      ClassId cls = class_of_class_object(arg(0));
      std::string name = string_value(arg(1), "method name");
      MethodId m = resolve(cls, name);
      if (!ct_.method(m).def->is_public()) fault(ct_.method(m).qualified + " is not public");
      Id mo = new_object(AllocSite::statement(site()), ct_.method_class(), history());
      heap_[Field{mo, std::string(kResolvedField)}] = value::MethodRef{m};
      bind_result(inv, value::Ref{mo, ct_.method_class()});
      next();
    } else if (q == kNewInstance) {
      ClassId cls = class_of_class_object(arg(0));
      const ClassInfo& info = ct_.cls(cls);
      if (info.def && info.def->is_abstract()) fault("cannot instantiate abstract " + info.name);
      if (!ct_.default_constructor(cls) || info.prelude.empty()) fault(info.name + " has no default constructor");
      Id o = new_object(AllocSite::statement(site()), cls, history());
      Value ref = value::Ref{o, cls};
      set_reg(std::string(kNewInstanceRegister), ref);
      bind_result(inv, ref);
      Code c = advance(ct_, code_);
      c.prelude = cls;
      c.prelude_pc = 0;
      code_ = c;
    } else if (q == kMethodInvoke) {
      const value::Ref& mo = object(arg(0), "method object");
      if (mo.cls != ct_.method_class()) fault("not a method object");
      auto m = std::get<value::MethodRef>(load(Field{mo.object, std::string(kResolvedField)}, "method")).method;
      const MethodDef& def = *ct_.method(m).def;
      // The argument array is not modeled; parameters take type defaults.
      std::vector<Value> params;
      for (const auto& t : def.params) params.push_back(default_of(t));
      std::optional<Value> receiver;
      if (!def.is_static()) {
        object(arg(1), "reflective receiver");
        receiver = arg(1);
      }
      call(m, receiver, std::move(params));
    } else {
      return false;
    }
    return true;
  }

  void invoke(const stmt::Invoke& inv) {
    std::vector<Value> args;
    for (const auto& a : inv.args) args.push_back(eval(a));
    if (reflective(inv, args)) return;
    switch (inv.kind) {
      case InvokeKind::Static:
      case InvokeKind::Direct: {
        auto cls = ct_.find_class(inv.class_name);
        if (!cls) fault("unknown class " + inv.class_name);
        call_with_args(resolve(*cls, inv.method_name), std::move(args));
        return;
      }
      case InvokeKind::Super: {
        ClassId owner = code_.prelude != kNoId ? code_.prelude : ct_.method(code_.method).owner;
        ClassId super = ct_.cls(owner).superclass;
        if (super == kNoId) fault("invoke-super from the root class");
        call_with_args(resolve(super, inv.method_name), std::move(args));
        return;
      }
      case InvokeKind::Virtual:
      case InvokeKind::Interface: {
        if (args.empty()) fault("missing receiver");
        const value::Ref& r = object(args.front(), "receiver");
        call_with_args(resolve(r.cls, inv.method_name), std::move(args));
        return;
      }
    }
  }

  void step() {
    const Stmt* s = head(ct_, code_);
    if (!s) fault("control fell off the end of the method");
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, stmt::Label> || std::is_same_v<T, stmt::Nop> ||
                        std::is_same_v<T, stmt::Line>) {
            next();
          } else if constexpr (std::is_same_v<T, stmt::Goto>) {
            code_ = label_code(st.label);
          } else if constexpr (std::is_same_v<T, stmt::If>) {
            if (as_bool(eval(st.condition))) {
              code_ = label_code(st.label);
            } else {
              next();
            }
          } else if constexpr (std::is_same_v<T, stmt::Assign>) {
            set_reg(st.dest, eval(st.value));
            next();
          } else if constexpr (std::is_same_v<T, stmt::New>) {
            ClassId cls = *ct_.find_class(st.class_name);
            set_reg(st.dest, value::Ref{new_object(AllocSite::statement(site()), cls, history()), cls});
            next();
          } else if constexpr (std::is_same_v<T, stmt::FieldGet>) {
            Value base = eval(st.object);
            const value::Ref& r = object(base, "field-get base");
            Value v = load(Field{r.object, st.field}, "field " + st.field);
            set_reg(st.dest, std::move(v));
            next();
          } else if constexpr (std::is_same_v<T, stmt::FieldPut>) {
            Value base = eval(st.object);
            const value::Ref& r = object(base, "field-put base");
            heap_[Field{r.object, st.field}] = eval(st.value);
            next();
          } else if constexpr (std::is_same_v<T, stmt::ConstString>) {
            Id o = new_object(AllocSite::statement(site()), ct_.string_class(), history());
            heap_[Field{o, std::string(kStringValueField)}] = st.literal;
            set_reg(st.dest, value::Ref{o, ct_.string_class()});
            next();
          } else if constexpr (std::is_same_v<T, stmt::Invoke>) {
            invoke(st);
          } else if constexpr (std::is_same_v<T, stmt::Return>) {
            Value v = eval(st.value);
            const Value& k = load(Kont{ka_}, "continuation");
            if (std::holds_alternative<value::Halt>(k)) {
              set_reg(std::string(kReturnRegister), v);
              code_ = Code::halted();
              return;
            }
            value::Fun f = std::get<value::Fun>(k);
            heap_[Reg{f.frame, std::string(kReturnRegister)}] = v;
            StmtId call = call_before(ct_, f.resume);
            if (call != kNoId) {
              if (auto inv = ct_.statement(call).stmt->as<stmt::Invoke>(); inv && inv->dest) {
                heap_[Reg{f.frame, *inv->dest}] = v;
              }
            }
            code_ = f.resume;
            fp_ = f.frame;
            ka_ = f.kont;
          }
        },
        s->node);
  }
};

}  // namespace

Run run_concrete(const ClassTable& ct, const std::vector<MethodId>& entries, std::size_t fuel) {
  Run run;
  Interpreter interp(ct, run.allocations);
  for (MethodId e : entries) run.traces.push_back(interp.run(e, fuel));
  return run;
}

Run run_concrete(const ClassTable& ct, MethodId entry, std::size_t fuel) {
  return run_concrete(ct, std::vector<MethodId>{entry}, fuel);
}

Context PointerMap::truncate(const Context& c) const {
  return Context(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(std::min(c.size(), k_)));
}

FramePointer PointerMap::frame(Id id) const {
  const FrameInfo& f = allocs_->frames.at(id);
  if (f.initial) return FramePointer::initial();
  return FramePointer{f.method, truncate(f.history)};
}

ObjectPointer PointerMap::object(Id id) const {
  const ObjectInfo& o = allocs_->objects.at(id);
  return ObjectPointer{o.site, truncate(o.history)};
}

KontAddr PointerMap::kont(Id id) const {
  const KontInfo& k = allocs_->konts.at(id);
  if (k.initial) return KontAddr::initial();
  return KontAddr{k.site, k.callee, truncate(k.history)};
}

Addr PointerMap::address(const Address& a) const {
  if (auto r = std::get_if<Reg>(&a)) return RegAddr{frame(r->frame), r->name};
  if (auto f = std::get_if<Field>(&a)) return FieldAddr{object(f->object), f->name};
  return kont(std::get<Kont>(a).kont);
}

Atom PointerMap::value(const Value& v) const {
  return std::visit(
      [&](const auto& x) -> Atom {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, value::Null>) {
          return atom::Null{};
        } else if constexpr (std::is_same_v<T, value::Void>) {
          return atom::Void{};
        } else if constexpr (std::is_same_v<T, bool>) {
          return exact_bool(x);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return exact_int(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return exact_string(x);
        } else if constexpr (std::is_same_v<T, value::Ref>) {
          return atom::Object{object(x.object), x.cls};
        } else if constexpr (std::is_same_v<T, value::MethodRef>) {
          return atom::Method{x.method};
        } else if constexpr (std::is_same_v<T, value::Fun>) {
          return atom::Fun{frame(x.frame), x.resume, kont(x.kont)};
        } else {
          return atom::Halt{};
        }
      },
      v);
}

Heap reachable(const ConcreteState& s) {
  const Heap& heap = *s.store;
  Heap out;
  std::set<Id> frames, objects;
  std::vector<Address> work;
  auto reach = [&](const Address& a) {
    auto it = heap.find(a);
    if (it != heap.end() && out.emplace(a, it->second).second) work.push_back(a);
  };
  auto reach_frame = [&](Id f) {
    if (!frames.insert(f).second) return;
    for (auto it = heap.lower_bound(Address{Reg{f, ""}}); it != heap.end(); ++it) {
      auto r = std::get_if<Reg>(&it->first);
      if (!r || r->frame != f) break;
      reach(it->first);
    }
  };
  auto reach_object = [&](Id o) {
    if (!objects.insert(o).second) return;
    for (auto it = heap.lower_bound(Address{Field{o, ""}}); it != heap.end(); ++it) {
      auto f = std::get_if<Field>(&it->first);
      if (!f || f->object != o) break;
      reach(it->first);
    }
  };
  reach_frame(s.frame);
  reach(Kont{s.kont});
  while (!work.empty()) {
    const Value v = heap.at(work.back());
    work.pop_back();
    if (auto r = std::get_if<value::Ref>(&v)) {
      reach_object(r->object);
    } else if (auto f = std::get_if<value::Fun>(&v)) {
      reach_frame(f->frame);
      reach(Kont{f->kont});
    }
  }
  return out;
}

bool abstracts(const Config& abs, const Store& abs_store, const ConcreteState& conc, const PointerMap& pm, Scope scope) {
  if (abs.code != conc.code) return false;
  if (abs.fp != pm.frame(conc.frame) || abs.ka != pm.kont(conc.kont)) return false;
  Heap scoped;
  const Heap& bindings = scope == Scope::Reachable ? (scoped = reachable(conc)) : *conc.store;
  for (const auto& [a, v] : bindings) {
    if (!AbstractValue{pm.value(v)}.leq(abs_store.lookup(pm.address(a)))) return false;
  }
  return true;
}

namespace {

Json value_json(const ClassTable& ct, const Value& v) {
  return std::visit(
      [&](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, value::Null>) {
          return Json{{"tag", "null"}};
        } else if constexpr (std::is_same_v<T, value::Void>) {
          return Json{{"tag", "void"}};
        } else if constexpr (std::is_same_v<T, bool>) {
          return Json{{"tag", "bool"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return Json{{"tag", "int"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, std::string>) {
          return Json{{"tag", "str"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, value::Ref>) {
          return Json{{"tag", "obj"}, {"id", x.object}, {"class", ct.cls(x.cls).name}};
        } else if constexpr (std::is_same_v<T, value::MethodRef>) {
          return Json{{"tag", "method"}, {"method", ct.method(x.method).qualified}};
        } else if constexpr (std::is_same_v<T, value::Fun>) {
          return Json{{"tag", "fun"}, {"frame", x.frame}, {"code", describe(ct, x.resume)}, {"kont", x.kont}};
        } else {
          return Json{{"tag", "halt"}};
        }
      },
      v);
}

Json address_json(const Address& a) {
  if (auto r = std::get_if<Reg>(&a)) return Json{{"tag", "reg"}, {"frame", r->frame}, {"reg", r->name}};
  if (auto f = std::get_if<Field>(&a)) return Json{{"tag", "field"}, {"object", f->object}, {"field", f->name}};
  return Json{{"tag", "kont"}, {"kont", std::get<Kont>(a).kont}};
}

}  // namespace

Json to_json(const ClassTable& ct, const Run& run) {
  Json traces = Json::array();
  for (const auto& t : run.traces) {
    Json states = Json::array();
    for (const auto& s : t.states) {
      Json store = Json::array();
      for (const auto& [a, v] : *s.store) store.push_back(Json::array({address_json(a), value_json(ct, v)}));
      states.push_back(Json{{"code", describe(ct, s.code)}, {"frame", s.frame}, {"kont", s.kont}, {"store", store}});
    }
    traces.push_back(Json{{"entry", ct.method(t.entry).qualified},
                          {"termination", termination_name(t.termination)},
                          {"error", t.error.empty() ? Json(nullptr) : Json(t.error)},
                          {"states", states}});
  }
  return Json{{"schema", 1}, {"traces", traces}};
}

}  // namespace oobc::concrete
