#pragma once

// Abstract syntax of the object-oriented bytecode.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oobc/sexpr.hpp"

namespace oobc {

enum class Attribute { Public, Private, Protected, Final, Abstract, Static };

using Attributes = std::set<Attribute>;

std::optional<Attribute> attribute_from_name(std::string_view name);
std::string_view attribute_name(Attribute a);

struct Type {
  enum class Kind { Int, Byte, Char, Short, Long, Boolean, Void, Class };

  Kind kind = Kind::Void;
  std::string class_name;  // only for Kind::Class

  static Type of_class(std::string name) { return {Kind::Class, std::move(name)}; }
  bool is_class() const { return kind == Kind::Class; }
  bool is_integral() const {
    return kind == Kind::Int || kind == Kind::Byte || kind == Kind::Char || kind == Kind::Short ||
           kind == Kind::Long;
  }
  bool operator==(const Type&) const = default;
};

Type parse_type_name(std::string_view name);
std::string type_name(const Type& t);

enum class AtomicOp { Add, Sub, Mul, Div, Eq, Lt, Gt, Not, And, Or };

std::optional<AtomicOp> atomic_op_from_name(std::string_view name);
std::string_view atomic_op_name(AtomicOp op);
std::size_t atomic_op_arity(AtomicOp op);

enum class AExpKind { This, True, False, Null, Void, Register, Int, Op, InstanceOf };

// Atomic expression. `name` is the register for Register and the class for
// InstanceOf; `operands` holds op arguments or the single instance-of operand.
struct AExp {
  AExpKind kind = AExpKind::Void;
  std::string name;
  std::int64_t number = 0;
  AtomicOp op = AtomicOp::Add;
  std::vector<AExp> operands;

  static AExp reg(std::string n) { return {AExpKind::Register, std::move(n), 0, AtomicOp::Add, {}}; }
  static AExp integer(std::int64_t v) { return {AExpKind::Int, {}, v, AtomicOp::Add, {}}; }
  static AExp simple(AExpKind k) { return {k, {}, 0, AtomicOp::Add, {}}; }
  static AExp apply(AtomicOp op, std::vector<AExp> args) {
    return {AExpKind::Op, {}, 0, op, std::move(args)};
  }
  static AExp instance_of(AExp operand, std::string cls) {
    return {AExpKind::InstanceOf, std::move(cls), 0, AtomicOp::Add, {std::move(operand)}};
  }

  bool operator==(const AExp&) const = default;
};

enum class InvokeKind { Static, Direct, Virtual, Interface, Super };

std::optional<InvokeKind> invoke_kind_from_name(std::string_view name);
std::string_view invoke_kind_name(InvokeKind k);

namespace stmt {

struct Label {
  std::string name;
  bool operator==(const Label&) const = default;
};
struct Nop {
  bool operator==(const Nop&) const = default;
};
struct Line {
  std::int64_t number = 0;
  bool operator==(const Line&) const = default;
};
struct Goto {
  std::string label;
  bool operator==(const Goto&) const = default;
};
struct If {
  AExp condition;
  std::string label;
  bool operator==(const If&) const = default;
};
struct Assign {
  std::string dest;
  AExp value;
  bool operator==(const Assign&) const = default;
};
struct New {
  std::string dest;
  std::string class_name;
  bool operator==(const New&) const = default;
};
// `(invoke-kind C/m (args) (types))`, either bare or as the right-hand
// side of an assign, in which case `dest` receives the returned value.
struct Invoke {
  std::optional<std::string> dest;
  InvokeKind kind = InvokeKind::Static;
  std::string class_name;
  std::string method_name;
  std::vector<AExp> args;
  std::vector<Type> types;

  std::string qualified() const { return class_name + "/" + method_name; }
  bool operator==(const Invoke&) const = default;
};
struct Return {
  AExp value;
  bool operator==(const Return&) const = default;
};
struct FieldPut {
  AExp object;
  std::string field;
  AExp value;
  bool operator==(const FieldPut&) const = default;
};
struct FieldGet {
  std::string dest;
  AExp object;
  std::string field;
  bool operator==(const FieldGet&) const = default;
};
struct ConstString {
  std::string dest;
  std::string literal;
  bool operator==(const ConstString&) const = default;
};

}  // namespace stmt

using StmtNode = std::variant<stmt::Label, stmt::Nop, stmt::Line, stmt::Goto, stmt::If, stmt::Assign,
                              stmt::New, stmt::Invoke, stmt::Return, stmt::FieldPut, stmt::FieldGet,
                              stmt::ConstString>;

struct Stmt {
  StmtNode node;
  SourcePos pos;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }

  // Structural equality; source positions are not compared.
  friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

struct FieldDef {
  Attributes attributes;
  std::string name;
  Type type;
  bool operator==(const FieldDef&) const = default;
};

struct MethodDef {
  Attributes attributes;
  std::string name;
  std::vector<Type> params;
  Type return_type;
  std::vector<std::string> throws;
  std::int64_t limit = 0;  // declared register count; stored, not interpreted
  std::vector<Stmt> body;
  SourcePos pos;

  bool is_static() const { return attributes.count(Attribute::Static) != 0; }
  bool is_public() const { return attributes.count(Attribute::Public) != 0; }

  friend bool operator==(const MethodDef& a, const MethodDef& b) {
    return a.attributes == b.attributes && a.name == b.name && a.params == b.params &&
           a.return_type == b.return_type && a.throws == b.throws && a.limit == b.limit &&
           a.body == b.body;
  }
};

struct ClassDef {
  Attributes attributes;
  std::string name;
  std::string superclass;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;
  SourcePos pos;

  bool is_abstract() const { return attributes.count(Attribute::Abstract) != 0; }

  friend bool operator==(const ClassDef& a, const ClassDef& b) {
    return a.attributes == b.attributes && a.name == b.name && a.superclass == b.superclass &&
           a.fields == b.fields && a.methods == b.methods;
  }
};

struct Program {
  std::vector<ClassDef> classes;  // source order
  bool operator==(const Program&) const = default;
};

inline constexpr std::string_view kObjectClass = "java/lang/Object";
inline constexpr std::string_view kStringClass = "java/lang/String";
inline constexpr std::string_view kClassClass = "java/lang/Class";
inline constexpr std::string_view kMethodClass = "java/lang/reflect/Method";
inline constexpr std::string_view kConstructorName = "<init>";
inline constexpr std::string_view kReturnRegister = "ret";
inline constexpr std::string_view kThisRegister = "this";

// Parameter i of a method is bound to register `p<i>`; instance methods
// additionally bind the receiver to `this`.
std::string param_register(std::size_t index);

std::string print_aexp(const AExp& e);
std::string print_stmt(const Stmt& s);
std::string print_program(const Program& p);

}  // namespace oobc
