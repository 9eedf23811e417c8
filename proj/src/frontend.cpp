#include "oobc/frontend.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

namespace oobc {

SemanticError::SemanticError(SourcePos pos, std::string symbol, const std::string& message)
    : std::runtime_error(to_string(pos) + ": " + message + ": " + symbol),
      pos_(pos),
      symbol_(std::move(symbol)) {}

bool is_builtin_class(std::string_view name) {
  return name == kObjectClass || name == kStringClass || name == kClassClass || name == kMethodClass;
}

namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& message) { throw SyntaxError(at.pos, message); }

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (!e.is_symbol()) fail(e, std::string("expected ") + what);
  return e.text;
}

void expect_arity(const SExpr& list, std::size_t n, const char* form) {
  if (list.items.size() != n) {
    fail(list, std::string("'") + form + "' expects " + std::to_string(n - 1) + " operand(s)");
  }
}

bool is_keyword_aexp(std::string_view s) {
  return s == "this" || s == "true" || s == "false" || s == "null" || s == "void";
}

AExp parse_aexp(const SExpr& e) {
  if (e.is_integer()) return AExp::integer(e.integer);
  if (e.is_symbol()) {
    if (e.text == "this") return AExp::simple(AExpKind::This);
    if (e.text == "true") return AExp::simple(AExpKind::True);
    if (e.text == "false") return AExp::simple(AExpKind::False);
    if (e.text == "null") return AExp::simple(AExpKind::Null);
    if (e.text == "void") return AExp::simple(AExpKind::Void);
    return AExp::reg(e.text);
  }
  if (e.is_string()) fail(e, "string literals are only allowed in const-string");
  std::string_view head = e.head();
  if (head.empty()) fail(e, "expected atomic expression");
  if (head == "instance-of") {
    expect_arity(e, 3, "instance-of");
    return AExp::instance_of(parse_aexp(e.items[1]), expect_symbol(e.items[2], "class name"));
  }
  auto op = atomic_op_from_name(head);
  if (!op) fail(e, "unknown atomic operation '" + std::string(head) + "'");
  if (e.items.size() - 1 != atomic_op_arity(*op)) {
    fail(e, "'" + std::string(head) + "' expects " + std::to_string(atomic_op_arity(*op)) + " operand(s)");
  }
  std::vector<AExp> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_aexp(e.items[i]));
  return AExp::apply(*op, std::move(args));
}

stmt::Invoke parse_invoke(const SExpr& e, InvokeKind kind) {
  expect_arity(e, 4, "invoke");
  const std::string& qualified = expect_symbol(e.items[1], "qualified method name");
  auto slash = qualified.rfind('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == qualified.size()) {
    fail(e.items[1], "method name must be qualified as class/method: " + qualified);
  }
  stmt::Invoke call;
  call.kind = kind;
  call.class_name = qualified.substr(0, slash);
  call.method_name = qualified.substr(slash + 1);
  if (!e.items[2].is_list()) fail(e.items[2], "expected argument list");
  for (const auto& a : e.items[2].items) call.args.push_back(parse_aexp(a));
  if (!e.items[3].is_list()) fail(e.items[3], "expected type list");
  for (const auto& t : e.items[3].items) call.types.push_back(parse_type_name(expect_symbol(t, "type")));
  return call;
}

Stmt parse_stmt(const SExpr& e) {
  Stmt s;
  s.pos = e.pos;
  std::string_view head = e.head();
  if (head.empty()) fail(e, "expected statement");
  if (head == "label") {
    expect_arity(e, 2, "label");
    s.node = stmt::Label{expect_symbol(e.items[1], "label")};
  } else if (head == "nop") {
    expect_arity(e, 1, "nop");
    s.node = stmt::Nop{};
  } else if (head == "line") {
    expect_arity(e, 2, "line");
    if (!e.items[1].is_integer()) fail(e.items[1], "expected line number");
    s.node = stmt::Line{e.items[1].integer};
  } else if (head == "goto") {
    expect_arity(e, 2, "goto");
    s.node = stmt::Goto{expect_symbol(e.items[1], "label")};
  } else if (head == "if") {
    expect_arity(e, 3, "if");
    const SExpr& target = e.items[2];
    if (target.head() != "goto" || target.items.size() != 2) fail(target, "expected (goto label)");
    s.node = stmt::If{parse_aexp(e.items[1]), expect_symbol(target.items[1], "label")};
  } else if (head == "assign") {
    expect_arity(e, 3, "assign");
    std::string dest = expect_symbol(e.items[1], "register name");
    const SExpr& rhs = e.items[2];
    std::string_view rhs_head = rhs.head();
    if (rhs_head == "new") {
      expect_arity(rhs, 2, "new");
      s.node = stmt::New{dest, expect_symbol(rhs.items[1], "class name")};
    } else if (auto kind = invoke_kind_from_name(rhs_head)) {
      auto call = parse_invoke(rhs, *kind);
      call.dest = dest;
      s.node = std::move(call);
    } else {
      s.node = stmt::Assign{dest, parse_aexp(rhs)};
    }
  } else if (head == "return") {
    expect_arity(e, 2, "return");
    s.node = stmt::Return{parse_aexp(e.items[1])};
  } else if (head == "field-put") {
    expect_arity(e, 4, "field-put");
    s.node = stmt::FieldPut{parse_aexp(e.items[1]), expect_symbol(e.items[2], "field name"),
                            parse_aexp(e.items[3])};
  } else if (head == "field-get") {
    expect_arity(e, 4, "field-get");
    s.node = stmt::FieldGet{expect_symbol(e.items[1], "register name"), parse_aexp(e.items[2]),
                            expect_symbol(e.items[3], "field name")};
  } else if (head == "const-string") {
    expect_arity(e, 3, "const-string");
    if (!e.items[2].is_string()) fail(e.items[2], "expected string literal");
    s.node = stmt::ConstString{expect_symbol(e.items[1], "register name"), e.items[2].text};
  } else if (auto kind = invoke_kind_from_name(head)) {
    s.node = parse_invoke(e, *kind);
  } else {
    fail(e, "unknown statement '" + std::string(head) + "'");
  }
  return s;
}

Attributes parse_attributes(const std::vector<SExpr>& items, std::size_t begin, std::size_t end) {
  Attributes out;
  for (std::size_t i = begin; i < end; ++i) {
    const std::string& name = expect_symbol(items[i], "attribute");
    auto a = attribute_from_name(name);
    if (!a) fail(items[i], "unknown attribute '" + name + "'");
    out.insert(*a);
  }
  return out;
}

FieldDef parse_field(const SExpr& e) {
  if (e.head() != "field" || e.items.size() < 3) fail(e, "expected (field attribute... name type)");
  FieldDef f;
  std::size_t n = e.items.size();
  f.attributes = parse_attributes(e.items, 1, n - 2);
  f.name = expect_symbol(e.items[n - 2], "field name");
  f.type = parse_type_name(expect_symbol(e.items[n - 1], "field type"));
  return f;
}

MethodDef parse_method(const SExpr& e) {
  if (e.head() != "method") fail(e, "expected (method ...)");
  MethodDef m;
  m.pos = e.pos;
  // The parameter list is the first list item; the method name precedes it.
  std::size_t params_at = 1;
  while (params_at < e.items.size() && !e.items[params_at].is_list()) ++params_at;
  if (params_at < 2 || params_at + 3 >= e.items.size()) {
    fail(e, "expected (method attribute... name (type...) type (throws ...) (limit n) stmt...)");
  }
  m.attributes = parse_attributes(e.items, 1, params_at - 1);
  m.name = expect_symbol(e.items[params_at - 1], "method name");
  for (const auto& t : e.items[params_at].items) m.params.push_back(parse_type_name(expect_symbol(t, "type")));
  m.return_type = parse_type_name(expect_symbol(e.items[params_at + 1], "return type"));
  const SExpr& throws = e.items[params_at + 2];
  if (throws.head() != "throws") fail(throws, "expected (throws class-name...)");
  for (std::size_t i = 1; i < throws.items.size(); ++i) m.throws.push_back(expect_symbol(throws.items[i], "class name"));
  const SExpr& limit = e.items[params_at + 3];
  if (limit.head() != "limit" || limit.items.size() != 2 || !limit.items[1].is_integer() || limit.items[1].integer < 0) {
    fail(limit, "expected (limit n) with non-negative n");
  }
  m.limit = limit.items[1].integer;
  for (std::size_t i = params_at + 4; i < e.items.size(); ++i) m.body.push_back(parse_stmt(e.items[i]));
  return m;
}

ClassDef parse_class(const SExpr& e) {
  if (!e.is_list()) fail(e, "expected class definition");
  std::size_t at = 0;
  while (at < e.items.size() && !e.items[at].is_symbol("class")) ++at;
  if (at == e.items.size() || at + 6 != e.items.size()) {
    fail(e, "expected (attribute... class name extends super (field...) (method...))");
  }
  ClassDef c;
  c.pos = e.pos;
  c.attributes = parse_attributes(e.items, 0, at);
  c.name = expect_symbol(e.items[at + 1], "class name");
  if (!e.items[at + 2].is_symbol("extends")) fail(e.items[at + 2], "expected 'extends'");
  c.superclass = expect_symbol(e.items[at + 3], "superclass name");
  if (!e.items[at + 4].is_list()) fail(e.items[at + 4], "expected field list");
  for (const auto& f : e.items[at + 4].items) c.fields.push_back(parse_field(f));
  if (!e.items[at + 5].is_list()) fail(e.items[at + 5], "expected method list");
  for (const auto& m : e.items[at + 5].items) c.methods.push_back(parse_method(m));
  return c;
}

void check_written_register(const std::string& name, SourcePos pos) {
  if (name == kReturnRegister) throw SemanticError(pos, name, "register 'ret' is reserved and cannot be written");
  if (is_keyword_aexp(name)) throw SemanticError(pos, name, "keyword used as register name");
  if (!name.empty() && name.front() == '$') throw SemanticError(pos, name, "register names beginning with '$' are reserved");
}

struct Validator {
  const Program& program;
  std::unordered_set<std::string> classes;

  bool known(const std::string& name) const { return classes.count(name) || is_builtin_class(name); }

  void require_class(const std::string& name, SourcePos pos) const {
    if (!known(name)) throw SemanticError(pos, name, "unknown class");
  }

  void run() {
    for (const auto& c : program.classes) {
      if (!classes.insert(c.name).second) throw SemanticError(c.pos, c.name, "duplicate class");
    }
    std::unordered_map<std::string, const ClassDef*> by_name;
    for (const auto& c : program.classes) by_name[c.name] = &c;

    for (const auto& c : program.classes) {
      require_class(c.superclass, c.pos);
      if (c.name == c.superclass && c.name != kObjectClass) {
        throw SemanticError(c.pos, c.name, "class extends itself");
      }
      std::set<std::string> fields;
      for (const auto& f : c.fields) {
        if (!fields.insert(f.name).second) throw SemanticError(c.pos, f.name, "duplicate field in " + c.name);
        if (f.type.is_class()) require_class(f.type.class_name, c.pos);
      }
      std::set<std::string> methods;
      for (const auto& m : c.methods) {
        if (!methods.insert(m.name).second) {
          throw SemanticError(m.pos, m.name, "duplicate method in " + c.name + " (overloading is not supported)");
        }
        check_method(m);
      }
    }
    // Every superclass chain must reach java/lang/Object without revisiting a class.
    for (const auto& c : program.classes) {
      std::set<std::string> seen;
      std::string cur = c.name;
      while (cur != kObjectClass) {
        if (!seen.insert(cur).second) throw SemanticError(c.pos, c.name, "inheritance cycle through");
        auto it = by_name.find(cur);
        if (it == by_name.end()) break;  // builtin stub, extends Object
        cur = it->second->superclass;
      }
    }
  }

  void check_method(const MethodDef& m) const {
    std::set<std::string> labels;
    for (const auto& s : m.body) {
      if (auto l = s.as<stmt::Label>()) {
        if (!labels.insert(l->name).second) throw SemanticError(s.pos, l->name, "duplicate label in " + m.name);
      }
    }
    auto require_label = [&](const std::string& label, SourcePos pos) {
      if (!labels.count(label)) throw SemanticError(pos, label, "dangling label in " + m.name);
    };
    for (const auto& s : m.body) {
      if (auto g = s.as<stmt::Goto>()) require_label(g->label, s.pos);
      if (auto i = s.as<stmt::If>()) require_label(i->label, s.pos);
      if (auto a = s.as<stmt::Assign>()) check_written_register(a->dest, s.pos);
      if (auto n = s.as<stmt::New>()) {
        check_written_register(n->dest, s.pos);
        require_class(n->class_name, s.pos);
      }
      if (auto c = s.as<stmt::Invoke>(); c && c->dest) check_written_register(*c->dest, s.pos);
      if (auto g = s.as<stmt::FieldGet>()) check_written_register(g->dest, s.pos);
      if (auto k = s.as<stmt::ConstString>()) check_written_register(k->dest, s.pos);
    }
  }
};

}  // namespace

void validate_program(const Program& program) { Validator{program, {}}.run(); }

Program parse_program(std::string_view text) {
  Program program;
  for (const auto& form : read_sexprs(text)) program.classes.push_back(parse_class(form));
  validate_program(program);
  return program;
}

LabelMap::LabelMap(const MethodDef& method) : method_(&method) {
  for (std::size_t i = 0; i < method.body.size(); ++i) {
    if (auto l = method.body[i].as<stmt::Label>()) index_.emplace(l->name, i);
  }
}

std::span<const Stmt> LabelMap::suffix(const std::string& label) const {
  return std::span<const Stmt>(method_->body).subspan(index_.at(label));
}

LabelMap build_label_map(const MethodDef& method) { return LabelMap(method); }

}  // namespace oobc
