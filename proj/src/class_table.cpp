#include "oobc/class_table.hpp"

#include <algorithm>

namespace oobc {

namespace {

std::string join_chain(const std::vector<std::string>& chain) {
  std::string out;
  for (const auto& c : chain) {
    if (!out.empty()) out += " -> ";
    out += c;
  }
  return out;
}

MethodDef make_empty_constructor() {
  MethodDef m;
  m.attributes = {Attribute::Public};
  m.name = std::string(kConstructorName);
  m.return_type = Type{Type::Kind::Void, {}};
  m.limit = 1;
  m.body.push_back(Stmt{stmt::Return{AExp::simple(AExpKind::Void)}, {}});
  return m;
}

}  // namespace

ResolveError::ResolveError(std::string method, std::vector<std::string> chain)
    : std::runtime_error("cannot resolve method '" + method + "' along " + join_chain(chain)),
      method_(std::move(method)),
      chain_(std::move(chain)) {}

std::vector<std::string> default_library_prefixes() {
  return {"java/", "javax/", "android/", "dalvik/", "com/android/", "org/apache/", "org/json/", "org/w3c/", "org/xml/"};
}

ClassTable::ClassTable(Program program, std::vector<std::string> library_prefixes)
    : program_(std::move(program)), library_prefixes_(std::move(library_prefixes)) {
  validate_program(program_);

  for (const auto& c : program_.classes) add_class(c.name, &c);
  for (std::string_view builtin : {kObjectClass, kStringClass, kClassClass, kMethodClass}) {
    if (!class_index_.count(builtin)) add_class(std::string(builtin), nullptr);
  }
  object_ = *find_class(kObjectClass);
  string_ = *find_class(kStringClass);
  class_ = *find_class(kClassClass);
  method_ = *find_class(kMethodClass);

  for (auto& info : classes_) {
    if (info.name == kObjectClass) {
      info.superclass = kNoId;
    } else if (info.def) {
      info.superclass = *find_class(info.def->superclass);
    } else {
      info.superclass = object_;
    }
  }

  for (auto& info : classes_) {
    if (info.def) {
      for (const auto& m : info.def->methods) add_method(info.id, &m, false);
    }
    if (info.library && !info.methods.count(kConstructorName)) {
      synthesized_methods_.push_back(make_empty_constructor());
      add_method(info.id, &synthesized_methods_.back(), true);
    }
  }

  for (auto& info : classes_) {
    if (!default_constructor(info.id)) continue;
    stmt::Invoke init;
    init.kind = InvokeKind::Direct;
    init.class_name = info.name;
    init.method_name = std::string(kConstructorName);
    init.args.push_back(AExp::reg(std::string(kNewInstanceRegister)));
    init.types.push_back(Type::of_class(info.name));
    info.prelude.push_back(Stmt{std::move(init), {}});
    info.prelude.push_back(
        Stmt{stmt::Assign{std::string(kReturnRegister), AExp::reg(std::string(kNewInstanceRegister))}, {}});
    info.prelude_first = static_cast<StmtId>(statements_.size());
    for (std::uint32_t i = 0; i < info.prelude.size(); ++i) {
      statements_.push_back(StmtInfo{&info.prelude[i], kNoId, info.id, i});
    }
  }
}

std::shared_ptr<const ClassTable> ClassTable::from_source(std::string_view text) {
  return std::make_shared<const ClassTable>(parse_program(text));
}

ClassId ClassTable::add_class(std::string name, const ClassDef* def) {
  ClassInfo info;
  info.id = static_cast<ClassId>(classes_.size());
  info.name = std::move(name);
  info.def = def;
  info.library = is_library_name(info.name);
  class_index_.emplace(info.name, info.id);
  classes_.push_back(std::move(info));
  return classes_.back().id;
}

MethodId ClassTable::add_method(ClassId owner, const MethodDef* def, bool synthesized) {
  MethodInfo info;
  info.id = static_cast<MethodId>(methods_.size());
  info.owner = owner;
  info.def = def;
  info.qualified = classes_[owner].name + "/" + def->name;
  info.labels = LabelMap(*def);
  info.first_stmt = static_cast<StmtId>(statements_.size());
  info.synthesized = synthesized;
  for (std::uint32_t i = 0; i < def->body.size(); ++i) {
    statements_.push_back(StmtInfo{&def->body[i], info.id, kNoId, i});
  }
  classes_[owner].methods.emplace(def->name, info.id);
  methods_.push_back(std::move(info));
  return methods_.back().id;
}

std::optional<ClassId> ClassTable::find_class(std::string_view name) const {
  auto it = class_index_.find(name);
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

bool ClassTable::is_library_name(std::string_view class_name) const {
  return std::any_of(library_prefixes_.begin(), library_prefixes_.end(),
                     [&](const std::string& p) { return class_name.starts_with(p); });
}

std::vector<ClassId> ClassTable::superclass_chain(ClassId cls) const {
  std::vector<ClassId> chain;
  for (ClassId cur = cls; cur != kNoId; cur = classes_.at(cur).superclass) chain.push_back(cur);
  return chain;
}

std::optional<MethodId> ClassTable::try_resolve(ClassId cls, std::string_view name) const {
  for (ClassId cur = cls; cur != kNoId; cur = classes_.at(cur).superclass) {
    const auto& methods = classes_.at(cur).methods;
    if (auto it = methods.find(name); it != methods.end()) return it->second;
  }
  return std::nullopt;
}

MethodId ClassTable::resolve_method(ClassId cls, std::string_view name) const {
  if (auto m = try_resolve(cls, name)) return *m;
  std::vector<std::string> chain;
  for (ClassId c : superclass_chain(cls)) chain.push_back(classes_[c].name);
  throw ResolveError(std::string(name), std::move(chain));
}

MethodId ClassTable::resolve_method(std::string_view class_name, std::string_view name) const {
  auto cls = find_class(class_name);
  if (!cls) throw ResolveError(std::string(name), {std::string(class_name)});
  return resolve_method(*cls, name);
}

bool ClassTable::is_subclass(ClassId sub, ClassId super) const {
  for (ClassId cur = sub; cur != kNoId; cur = classes_.at(cur).superclass) {
    if (cur == super) return true;
  }
  return false;
}

std::vector<const FieldDef*> ClassTable::all_fields(ClassId cls) const {
  std::vector<const FieldDef*> out;
  for (ClassId c : superclass_chain(cls)) {
    if (const ClassDef* def = classes_[c].def) {
      for (const auto& f : def->fields) out.push_back(&f);
    }
  }
  return out;
}

std::optional<MethodId> ClassTable::default_constructor(ClassId cls) const {
  const auto& methods = classes_.at(cls).methods;
  auto it = methods.find(kConstructorName);
  if (it == methods.end()) return std::nullopt;
  if (!methods_[it->second].def->params.empty()) return std::nullopt;
  return it->second;
}

std::optional<MethodId> ClassTable::find_method(std::string_view qualified) const {
  auto slash = qualified.rfind('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto cls = find_class(qualified.substr(0, slash));
  if (!cls) return std::nullopt;
  const auto& methods = classes_[*cls].methods;
  auto it = methods.find(qualified.substr(slash + 1));
  if (it == methods.end()) return std::nullopt;
  return it->second;
}

std::string ClassTable::site_name(StmtId id) const {
  const StmtInfo& info = statements_.at(id);
  if (info.method != kNoId) return methods_[info.method].qualified + "#" + std::to_string(info.index);
  return classes_[info.prelude_class].name + "/<new-instance>#" + std::to_string(info.index);
}

}  // namespace oobc
