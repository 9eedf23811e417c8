#include "oobc/reflection.hpp"

#include <algorithm>
#include <set>

namespace oobc {

namespace {

const atom::Object* object_of(const Atom& a) { return std::get_if<atom::Object>(&a); }

std::string field(std::string_view f) { return std::string(f); }

std::string dotted_to_slashed(std::string s) {
  std::replace(s.begin(), s.end(), '.', '/');
  return s;
}

// Exact string contents held by the string objects in `v`.
std::vector<std::string> string_contents(const Store& store, const AbstractValue& v, ClassId string_class,
                                         bool& unknown, bool& none) {
  std::set<std::string> out;
  none = true;
  for (const auto& a : v) {
    auto obj = object_of(a);
    if (!obj || obj->cls != string_class) continue;
    for (const auto& s : store.lookup(FieldAddr{obj->ptr, field(kStringValueField)})) {
      if (auto str = std::get_if<atom::Str>(&s)) {
        none = false;
        if (str->is_top()) {
          unknown = true;
        } else {
          out.insert(*str->value);
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

// Result binding shared by the intercepted calls: `ret` and, for the
// assign form, the destination register.
void bind_result(const StepContext& cx, const stmt::Invoke& call, StoreDelta& delta, const AbstractValue& v) {
  delta.emplace_back(cx.reg(std::string(kReturnRegister)), v);
  if (call.dest) delta.emplace_back(cx.reg(*call.dest), v);
}

std::vector<atom::Object> objects_of_class(const AbstractValue& v, ClassId cls) {
  std::vector<atom::Object> out;
  for (const auto& a : v)
    if (auto obj = object_of(a); obj && obj->cls == cls) out.push_back(*obj);
  return out;
}

}  // namespace

bool is_reflective_api(std::string_view qualified) {
  return qualified == kForName || qualified == kGetMethod || qualified == kNewInstance || qualified == kMethodInvoke;
}

std::vector<std::string> class_names_of(const Store& store, const ObjectPointer& class_object, bool& unknown) {
  std::set<std::string> out;
  for (const auto& a : store.lookup(FieldAddr{class_object, field(kClassNameField)})) {
    auto obj = object_of(a);
    if (!obj) continue;
    for (const auto& s : store.lookup(FieldAddr{obj->ptr, field(kStringValueField)})) {
      if (auto str = std::get_if<atom::Str>(&s)) {
        if (str->is_top()) {
          unknown = true;
        } else {
          out.insert(dotted_to_slashed(*str->value));
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

bool intercept_reflection(const StepContext& cx, const stmt::Invoke& call) {
  std::string q = call.qualified();
  if (q == kForName) {
    step_forname(cx, call);
  } else if (q == kGetMethod) {
    step_getmethod(cx, call);
  } else if (q == kNewInstance) {
    step_newinstance(cx, call);
  } else if (q == kMethodInvoke) {
    step_reflect_invoke(cx, call);
  } else {
    return false;
  }
  return true;
}

void step_const_string(const StepContext& cx, const stmt::ConstString& s) {
  ObjectPointer op = alloc_op(cx.ct, cx.config, cx.policy);
  StoreDelta delta{{cx.reg(s.dest), AbstractValue{atom::Object{op, cx.ct.string_class()}}},
                   {FieldAddr{op, field(kStringValueField)}, AbstractValue{exact_string(s.literal)}}};
  cx.emit(EventKind::Allocation, std::string(kStringClass));
  cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, std::move(delta), "const-string");
}

void step_forname(const StepContext& cx, const stmt::Invoke& call) {
  Config next{cx.next_code(), cx.config.fp, cx.config.ka};
  if (call.args.empty()) {
    cx.diagnose("forName without a class-name argument");
    cx.add(next, {}, "forName");
    return;
  }
  AbstractValue strings;
  for (const auto& obj : objects_of_class(cx.eval(call.args[0]), cx.ct.string_class())) strings.insert(obj);
  if (strings.empty()) {
    cx.diagnose("forName argument holds no string object");
    cx.add(next, {}, "forName");
    return;
  }
  ObjectPointer op = alloc_op(cx.ct, cx.config, cx.policy);
  StoreDelta delta{{FieldAddr{op, field(kClassNameField)}, strings}};
  bind_result(cx, call, delta, AbstractValue{atom::Object{op, cx.ct.class_class()}});
  cx.emit(EventKind::Reflection, std::string(kForName));
  cx.add(next, std::move(delta), "forName");
}

void step_getmethod(const StepContext& cx, const stmt::Invoke& call) {
  if (call.args.size() < 2) {
    cx.diagnose("getMethod needs a class object and a method name");
    return;
  }
  auto class_objects = objects_of_class(cx.eval(call.args[0]), cx.ct.class_class());
  if (class_objects.empty()) {
    cx.diagnose("getMethod: receiver holds no class object");
    return;
  }
  std::set<std::string> classes;
  for (const auto& obj : class_objects) {
    bool unknown = false;
    auto names = class_names_of(cx.store, obj.ptr, unknown);
    if (unknown) cx.diagnose("getMethod: unknown class set");
    classes.insert(names.begin(), names.end());
  }
  if (classes.empty()) {
    cx.diagnose("getMethod: no exact class name");
    return;
  }
  bool unknown = false, none = false;
  auto method_names = string_contents(cx.store, cx.eval(call.args[1]), cx.ct.string_class(), unknown, none);
  if (unknown) cx.diagnose("unresolved reflective method");
  if (method_names.empty()) {
    if (none) cx.diagnose("getMethod: method name holds no string");
    return;
  }
  AbstractValue resolved;
  for (const auto& cname : classes) {
    auto cls = cx.ct.find_class(cname);
    if (!cls) {
      cx.diagnose("getMethod: unknown class " + cname);
      continue;
    }
    for (const auto& mname : method_names) {
      auto m = cx.ct.try_resolve(*cls, mname);
      if (!m) {
        cx.diagnose("getMethod: no method " + mname + " on " + cname);
      } else if (!cx.ct.method(*m).def->is_public()) {
        cx.diagnose("getMethod: " + cx.ct.method(*m).qualified + " is not public");
      } else {
        resolved.insert(atom::Method{*m});
      }
    }
  }
  if (resolved.empty()) return;
  ObjectPointer op = alloc_op(cx.ct, cx.config, cx.policy);
  StoreDelta delta{{FieldAddr{op, field(kResolvedField)}, resolved}};
  bind_result(cx, call, delta, AbstractValue{atom::Object{op, cx.ct.method_class()}});
  cx.emit(EventKind::Reflection, std::string(kGetMethod));
  cx.add(Config{cx.next_code(), cx.config.fp, cx.config.ka}, std::move(delta), "getMethod");
}

void step_newinstance(const StepContext& cx, const stmt::Invoke& call) {
  if (call.args.empty()) {
    cx.diagnose("newInstance without a class object");
    return;
  }
  auto class_objects = objects_of_class(cx.eval(call.args[0]), cx.ct.class_class());
  if (class_objects.empty()) {
    cx.diagnose("newInstance: receiver holds no class object");
    return;
  }
  std::set<std::string> classes;
  for (const auto& obj : class_objects) {
    bool unknown = false;
    auto names = class_names_of(cx.store, obj.ptr, unknown);
    if (unknown) cx.diagnose("newInstance: unknown class set");
    classes.insert(names.begin(), names.end());
  }
  ObjectPointer op = alloc_op(cx.ct, cx.config, cx.policy);
  for (const auto& cname : classes) {
    auto cls = cx.ct.find_class(cname);
    if (!cls) {
      cx.diagnose("newInstance: unknown class " + cname);
      continue;
    }
    const ClassInfo& info = cx.ct.cls(*cls);
    if (info.def && info.def->is_abstract()) {
      cx.diagnose("newInstance: " + cname + " is abstract");
      continue;
    }
    if (!cx.ct.default_constructor(*cls) || info.prelude.empty()) {
      cx.diagnose("newInstance: " + cname + " has no default constructor");
      continue;
    }
    AbstractValue obj{atom::Object{op, *cls}};
    StoreDelta delta{{cx.reg(std::string(kNewInstanceRegister)), obj}};
    bind_result(cx, call, delta, obj);
    for (auto& b : init_object(cx.ct, op, *cls)) delta.push_back(std::move(b));
    Code code = cx.next_code();
    code.prelude = *cls;
    code.prelude_pc = 0;
    cx.emit(EventKind::Reflection, "newInstance " + cname);
    cx.add(Config{code, cx.config.fp, cx.config.ka}, std::move(delta), "newInstance");
  }
}

void step_reflect_invoke(const StepContext& cx, const stmt::Invoke& call) {
  if (call.args.empty()) {
    cx.diagnose("Method.invoke without a method object");
    return;
  }
  auto method_objects = objects_of_class(cx.eval(call.args[0]), cx.ct.method_class());
  std::set<MethodId> targets;
  for (const auto& obj : method_objects)
    for (const auto& m : cx.store.lookup(FieldAddr{obj.ptr, field(kResolvedField)}).select<atom::Method>())
      targets.insert(m.method);
  if (targets.empty()) {
    cx.diagnose("Method.invoke: no resolved method object");
    return;
  }
  AbstractValue receivers = call.args.size() > 1 ? cx.eval(call.args[1]) : AbstractValue{};
  for (MethodId m : targets) {
    const MethodInfo& info = cx.ct.method(m);
    std::vector<AbstractValue> params;
    for (const auto& t : info.def->params) params.push_back(top_value(t));
    std::vector<std::optional<AbstractValue>> calls;
    if (info.def->is_static()) {
      calls.emplace_back(std::nullopt);
    } else {
      for (const auto& a : receivers) {
        if (object_of(a)) {
          calls.emplace_back(AbstractValue{a});
        } else {
          cx.diagnose("Method.invoke: non-object receiver for " + info.qualified);
        }
      }
    }
    if (calls.empty()) continue;
    cx.emit(EventKind::Resolved, info.qualified);
    if (cx.ct.is_library(info.owner)) cx.emit(EventKind::ApiCall, info.qualified);
    cx.emit(EventKind::Reflection, std::string(kMethodInvoke) + " " + info.qualified);
    for (const auto& receiver : calls) {
      Successor s = apply_method(cx.ct, m, receiver, params, cx.config, cx.policy);
      s.rule = "reflect-invoke";
      cx.out.successors.push_back(std::move(s));
    }
  }
}

}  // namespace oobc
