#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oobc/frontend.hpp"
#include "oobc/syntax.hpp"

namespace oobc {

using ClassId = std::uint32_t;
using MethodId = std::uint32_t;
using StmtId = std::uint32_t;

inline constexpr std::uint32_t kNoId = UINT32_MAX;

class ResolveError : public std::runtime_error {
 public:
  ResolveError(std::string method, std::vector<std::string> chain);
  const std::vector<std::string>& chain() const { return chain_; }
  const std::string& method() const { return method_; }

 private:
  std::string method_;
  std::vector<std::string> chain_;
};

struct MethodInfo {
  MethodId id = kNoId;
  ClassId owner = kNoId;
  const MethodDef* def = nullptr;
  std::string qualified;  // owner/name
  LabelMap labels;
  StmtId first_stmt = kNoId;
  bool synthesized = false;
};

struct ClassInfo {
  ClassId id = kNoId;
  std::string name;
  ClassId superclass = kNoId;  // kNoId only for the root
  const ClassDef* def = nullptr;  // null for implicit builtin classes
  std::map<std::string, MethodId, std::less<>> methods;
  bool library = false;
  // Statements run after a reflective newInstance: call the default
  // constructor on the fresh object, then restore it into `ret`.
  std::vector<Stmt> prelude;
  StmtId prelude_first = kNoId;
};

// Where a statement lives: a method body, or a class's newInstance prelude.
struct StmtInfo {
  const Stmt* stmt = nullptr;
  MethodId method = kNoId;
  ClassId prelude_class = kNoId;
  std::uint32_t index = 0;
};

// Packages treated as platform/library code. Calls resolving into these
// classes are reported as API calls.
std::vector<std::string> default_library_prefixes();

inline constexpr std::string_view kNewInstanceRegister = "$new-instance";

// Indexed, immutable view of a validated program.
class ClassTable {
 public:
  explicit ClassTable(Program program, std::vector<std::string> library_prefixes = default_library_prefixes());
  ClassTable(const ClassTable&) = delete;
  ClassTable& operator=(const ClassTable&) = delete;

  static std::shared_ptr<const ClassTable> from_source(std::string_view text);

  const Program& program() const { return program_; }

  std::optional<ClassId> find_class(std::string_view name) const;
  const ClassInfo& cls(ClassId id) const { return classes_.at(id); }
  const MethodInfo& method(MethodId id) const { return methods_.at(id); }
  const StmtInfo& statement(StmtId id) const { return statements_.at(id); }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t method_count() const { return methods_.size(); }
  std::size_t statement_count() const { return statements_.size(); }

  // Nearest definition walking from `cls` up the superclass chain.
  MethodId resolve_method(ClassId cls, std::string_view name) const;
  MethodId resolve_method(std::string_view class_name, std::string_view name) const;
  std::optional<MethodId> try_resolve(ClassId cls, std::string_view name) const;

  std::vector<ClassId> superclass_chain(ClassId cls) const;
  bool is_subclass(ClassId sub, ClassId super) const;

  // Declared fields of the class and all its ancestors, nearest first.
  std::vector<const FieldDef*> all_fields(ClassId cls) const;

  // The zero-parameter `<init>` declared on the class itself.
  std::optional<MethodId> default_constructor(ClassId cls) const;

  bool is_library(ClassId cls) const { return cls < classes_.size() && classes_[cls].library; }
  bool is_library_name(std::string_view class_name) const;

  // Qualified method name (`C/m`) to id.
  std::optional<MethodId> find_method(std::string_view qualified) const;

  // "C/m#i" for body statements, "C/<new-instance>#i" for prelude statements.
  std::string site_name(StmtId id) const;

  ClassId object_class() const { return object_; }
  ClassId string_class() const { return string_; }
  ClassId class_class() const { return class_; }
  ClassId method_class() const { return method_; }

 private:
  ClassId add_class(std::string name, const ClassDef* def);
  MethodId add_method(ClassId owner, const MethodDef* def, bool synthesized);

  Program program_;
  std::vector<std::string> library_prefixes_;
  std::deque<MethodDef> synthesized_methods_;
  std::deque<ClassInfo> classes_;
  std::deque<MethodInfo> methods_;
  std::vector<StmtInfo> statements_;
  std::map<std::string, ClassId, std::less<>> class_index_;
  ClassId object_ = kNoId, string_ = kNoId, class_ = kNoId, method_ = kNoId;
};

}  // namespace oobc
