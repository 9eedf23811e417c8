#include "oobc/domain.hpp"

#include <algorithm>

namespace oobc {

StmtId head_stmt(const ClassTable& ct, const Code& code) {
  if (code.prelude != kNoId) {
    const ClassInfo& cls = ct.cls(code.prelude);
    return cls.prelude_first + code.prelude_pc;
  }
  if (code.method == kNoId) return kNoId;
  const MethodInfo& m = ct.method(code.method);
  if (code.pc >= m.def->body.size()) return kNoId;
  return m.first_stmt + code.pc;
}

const Stmt* head(const ClassTable& ct, const Code& code) {
  StmtId id = head_stmt(ct, code);
  return id == kNoId ? nullptr : ct.statement(id).stmt;
}

Code advance(const ClassTable& ct, Code code) {
  if (code.prelude != kNoId) {
    if (++code.prelude_pc >= ct.cls(code.prelude).prelude.size()) {
      code.prelude = kNoId;
      code.prelude_pc = 0;
    }
    return code;
  }
  ++code.pc;
  return code;
}

StmtId call_before(const ClassTable& ct, const Code& resume) {
  if (resume.prelude != kNoId && resume.prelude_pc > 0) {
    return ct.cls(resume.prelude).prelude_first + resume.prelude_pc - 1;
  }
  if (resume.method == kNoId || resume.pc == 0) return kNoId;
  return ct.method(resume.method).first_stmt + resume.pc - 1;
}

Context push_context(StmtId site, const Context& ctx, std::size_t limit) {
  Context out;
  if (limit == 0) return out;
  out.reserve(std::min(limit, ctx.size() + 1));
  out.push_back(site);
  for (std::size_t i = 0; i < ctx.size() && out.size() < limit; ++i) out.push_back(ctx[i]);
  return out;
}

namespace {

// Index of the flat lattice an atom belongs to, if any.
std::optional<std::size_t> flat_kind(const Atom& a) {
  if (std::holds_alternative<atom::Bool>(a) || std::holds_alternative<atom::Int>(a) ||
      std::holds_alternative<atom::Str>(a)) {
    return a.index();
  }
  return std::nullopt;
}

bool flat_is_top(const Atom& a) {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, atom::Bool> || std::is_same_v<T, atom::Int> || std::is_same_v<T, atom::Str>) {
          return v.is_top();
        } else {
          return false;
        }
      },
      a);
}

Atom flat_top(std::size_t index) {
  switch (index) {
    case 2: return top_bool();
    case 3: return top_int();
    default: return top_string();
  }
}

}  // namespace

bool atom_leq(const Atom& a, const Atom& b) {
  if (a.index() != b.index()) return false;
  if (flat_kind(a) && flat_is_top(b)) return true;
  return a == b;
}

AbstractValue::AbstractValue(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) insert(a);
}

bool AbstractValue::insert(const Atom& a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (auto kind = flat_kind(a)) {
    // At most one element per flat lattice; it sits where `a` would go.
    auto same = std::find_if(atoms_.begin(), atoms_.end(), [&](const Atom& x) { return x.index() == *kind; });
    if (same == atoms_.end()) {
      atoms_.insert(it, a);
      return true;
    }
    if (*same == a || flat_is_top(*same)) return false;
    *same = flat_top(*kind);
    return true;
  }
  if (it != atoms_.end() && *it == a) return false;
  atoms_.insert(it, a);
  return true;
}

bool AbstractValue::join(const AbstractValue& other) {
  bool changed = false;
  for (const auto& a : other.atoms_) changed |= insert(a);
  return changed;
}

bool AbstractValue::contains(const Atom& a) const { return std::binary_search(atoms_.begin(), atoms_.end(), a); }

bool AbstractValue::leq(const AbstractValue& other) const {
  for (const auto& a : atoms_) {
    if (flat_kind(a)) {
      auto match = std::find_if(other.atoms_.begin(), other.atoms_.end(),
                                [&](const Atom& b) { return b.index() == a.index(); });
      if (match == other.atoms_.end() || !atom_leq(a, *match)) return false;
    } else if (!other.contains(a)) {
      return false;
    }
  }
  return true;
}

AbstractValue join(AbstractValue a, const AbstractValue& b) {
  a.join(b);
  return a;
}

const AbstractValue& Store::lookup(const Addr& a) const {
  static const AbstractValue kEmpty;
  auto it = bindings_.find(a);
  return it == bindings_.end() ? kEmpty : it->second;
}

bool Store::join_at(const Addr& a, const AbstractValue& v) {
  if (v.empty()) return false;
  auto it = bindings_.find(a);
  if (it == bindings_.end()) {
    bindings_.emplace(a, v);
    return true;
  }
  return it->second.join(v);
}

bool Store::join(const Store& other) {
  bool changed = false;
  for (const auto& [a, v] : other.bindings_) changed |= join_at(a, v);
  return changed;
}

bool Store::leq(const Store& other) const {
  for (const auto& [a, v] : bindings_) {
    auto it = other.bindings_.find(a);
    if (it == other.bindings_.end() || !v.leq(it->second)) return false;
  }
  return true;
}

Store join(Store a, const Store& b) {
  a.join(b);
  return a;
}

}  // namespace oobc
