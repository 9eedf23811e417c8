#include "oobc/syntax.hpp"

#include <array>
#include <sstream>

namespace oobc {

namespace {

constexpr std::array<std::pair<std::string_view, Attribute>, 6> kAttributeNames{{
    {"public", Attribute::Public},
    {"private", Attribute::Private},
    {"protected", Attribute::Protected},
    {"final", Attribute::Final},
    {"abstract", Attribute::Abstract},
    {"static", Attribute::Static},
}};

constexpr std::array<std::pair<std::string_view, AtomicOp>, 10> kOpNames{{
    {"add", AtomicOp::Add},
    {"sub", AtomicOp::Sub},
    {"mul", AtomicOp::Mul},
    {"div", AtomicOp::Div},
    {"eq", AtomicOp::Eq},
    {"lt", AtomicOp::Lt},
    {"gt", AtomicOp::Gt},
    {"not", AtomicOp::Not},
    {"and", AtomicOp::And},
    {"or", AtomicOp::Or},
}};

// `invoke-interafce` is the historical spelling in the grammar; both read
// as Interface, and printing uses the corrected spelling.
constexpr std::array<std::pair<std::string_view, InvokeKind>, 6> kInvokeNames{{
    {"invoke-static", InvokeKind::Static},
    {"invoke-direct", InvokeKind::Direct},
    {"invoke-virtual", InvokeKind::Virtual},
    {"invoke-interface", InvokeKind::Interface},
    {"invoke-interafce", InvokeKind::Interface},
    {"invoke-super", InvokeKind::Super},
}};

constexpr std::array<std::pair<std::string_view, Type::Kind>, 7> kPrimitiveTypes{{
    {"int", Type::Kind::Int},
    {"byte", Type::Kind::Byte},
    {"char", Type::Kind::Char},
    {"short", Type::Kind::Short},
    {"long", Type::Kind::Long},
    {"boolean", Type::Kind::Boolean},
    {"void", Type::Kind::Void},
}};

void print_attributes(std::ostream& out, const Attributes& attrs) {
  for (Attribute a : attrs) out << attribute_name(a) << ' ';
}

}  // namespace

std::optional<Attribute> attribute_from_name(std::string_view name) {
  for (auto [n, a] : kAttributeNames)
    if (n == name) return a;
  return std::nullopt;
}

std::string_view attribute_name(Attribute a) {
  for (auto [n, v] : kAttributeNames)
    if (v == a) return n;
  return "?";
}

Type parse_type_name(std::string_view name) {
  for (auto [n, k] : kPrimitiveTypes)
    if (n == name) return Type{k, {}};
  return Type::of_class(std::string(name));
}

std::string type_name(const Type& t) {
  if (t.is_class()) return t.class_name;
  for (auto [n, k] : kPrimitiveTypes)
    if (k == t.kind) return std::string(n);
  return "?";
}

std::optional<AtomicOp> atomic_op_from_name(std::string_view name) {
  for (auto [n, op] : kOpNames)
    if (n == name) return op;
  return std::nullopt;
}

std::string_view atomic_op_name(AtomicOp op) {
  for (auto [n, v] : kOpNames)
    if (v == op) return n;
  return "?";
}

std::size_t atomic_op_arity(AtomicOp op) { return op == AtomicOp::Not ? 1 : 2; }

std::optional<InvokeKind> invoke_kind_from_name(std::string_view name) {
  for (auto [n, k] : kInvokeNames)
    if (n == name) return k;
  return std::nullopt;
}

std::string_view invoke_kind_name(InvokeKind k) {
  for (auto [n, v] : kInvokeNames)
    if (v == k) return n;
  return "?";
}

std::string param_register(std::size_t index) { return "p" + std::to_string(index); }

std::string print_aexp(const AExp& e) {
  switch (e.kind) {
    case AExpKind::This: return "this";
    case AExpKind::True: return "true";
    case AExpKind::False: return "false";
    case AExpKind::Null: return "null";
    case AExpKind::Void: return "void";
    case AExpKind::Register: return e.name;
    case AExpKind::Int: return std::to_string(e.number);
    case AExpKind::Op: {
      std::string out = "(" + std::string(atomic_op_name(e.op));
      for (const auto& arg : e.operands) out += " " + print_aexp(arg);
      return out + ")";
    }
    case AExpKind::InstanceOf:
      return "(instance-of " + print_aexp(e.operands.at(0)) + " " + e.name + ")";
  }
  return "?";
}

namespace {

std::string print_invoke(const stmt::Invoke& call) {
  std::string out = "(" + std::string(invoke_kind_name(call.kind)) + " " + call.qualified() + " (";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += " ";
    out += print_aexp(call.args[i]);
  }
  out += ") (";
  for (std::size_t i = 0; i < call.types.size(); ++i) {
    if (i) out += " ";
    out += type_name(call.types[i]);
  }
  return out + "))";
}

struct StmtPrinter {
  std::string operator()(const stmt::Label& s) const { return "(label " + s.name + ")"; }
  std::string operator()(const stmt::Nop&) const { return "(nop)"; }
  std::string operator()(const stmt::Line& s) const { return "(line " + std::to_string(s.number) + ")"; }
  std::string operator()(const stmt::Goto& s) const { return "(goto " + s.label + ")"; }
  std::string operator()(const stmt::If& s) const {
    return "(if " + print_aexp(s.condition) + " (goto " + s.label + "))";
  }
  std::string operator()(const stmt::Assign& s) const {
    return "(assign " + s.dest + " " + print_aexp(s.value) + ")";
  }
  std::string operator()(const stmt::New& s) const {
    return "(assign " + s.dest + " (new " + s.class_name + "))";
  }
  std::string operator()(const stmt::Invoke& s) const {
    if (s.dest) return "(assign " + *s.dest + " " + print_invoke(s) + ")";
    return print_invoke(s);
  }
  std::string operator()(const stmt::Return& s) const { return "(return " + print_aexp(s.value) + ")"; }
  std::string operator()(const stmt::FieldPut& s) const {
    return "(field-put " + print_aexp(s.object) + " " + s.field + " " + print_aexp(s.value) + ")";
  }
  std::string operator()(const stmt::FieldGet& s) const {
    return "(field-get " + s.dest + " " + print_aexp(s.object) + " " + s.field + ")";
  }
  std::string operator()(const stmt::ConstString& s) const {
    return "(const-string " + s.dest + " " + quote_string(s.literal) + ")";
  }
};

}  // namespace

std::string print_stmt(const Stmt& s) { return std::visit(StmtPrinter{}, s.node); }

std::string print_program(const Program& p) {
  std::ostringstream out;
  for (const auto& cls : p.classes) {
    out << '(';
    print_attributes(out, cls.attributes);
    out << "class " << cls.name << " extends " << cls.superclass << "\n  (";
    for (std::size_t i = 0; i < cls.fields.size(); ++i) {
      const auto& f = cls.fields[i];
      if (i) out << "\n   ";
      out << "(field ";
      print_attributes(out, f.attributes);
      out << f.name << ' ' << type_name(f.type) << ')';
    }
    out << ")\n  (";
    for (std::size_t i = 0; i < cls.methods.size(); ++i) {
      const auto& m = cls.methods[i];
      if (i) out << "\n   ";
      out << "(method ";
      print_attributes(out, m.attributes);
      out << m.name << " (";
      for (std::size_t j = 0; j < m.params.size(); ++j) {
        if (j) out << ' ';
        out << type_name(m.params[j]);
      }
      out << ") " << type_name(m.return_type) << " (throws";
      for (const auto& t : m.throws) out << ' ' << t;
      out << ") (limit " << m.limit << ')';
      for (const auto& s : m.body) out << "\n    " << print_stmt(s);
      out << ')';
    }
    out << "))\n";
  }
  return out.str();
}

}  // namespace oobc
