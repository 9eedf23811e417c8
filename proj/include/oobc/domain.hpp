#pragma once

// Abstract state-space: addresses, values, stores, continuations and
// machine configurations, with the lifted lattice order and join.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oobc/class_table.hpp"

namespace oobc {

// Position in a statement sequence: an optional newInstance prelude
// followed by the suffix of a method body starting at `pc`.
struct Code {
  MethodId method = kNoId;
  std::uint32_t pc = 0;
  ClassId prelude = kNoId;
  std::uint32_t prelude_pc = 0;

  static Code halted() { return {}; }
  static Code at(MethodId m, std::uint32_t pc = 0) { return {m, pc, kNoId, 0}; }
  bool is_halted() const { return method == kNoId && prelude == kNoId; }
  auto operator<=>(const Code&) const = default;
};

// Head statement id, or kNoId when halted or past the end of the body.
StmtId head_stmt(const ClassTable& ct, const Code& code);
const Stmt* head(const ClassTable& ct, const Code& code);
Code advance(const ClassTable& ct, Code code);
// The statement that precedes `resume`, i.e. the call a continuation returns to.
StmtId call_before(const ClassTable& ct, const Code& resume);

// Most recent call site first; at most k entries in abstract tokens.
using Context = std::vector<StmtId>;

Context push_context(StmtId site, const Context& ctx, std::size_t limit);

struct FramePointer {
  MethodId method = kNoId;  // kNoId: the initial frame fp0
  Context ctx;

  static FramePointer initial() { return {}; }
  bool is_initial() const { return method == kNoId; }
  auto operator<=>(const FramePointer&) const = default;
};

struct AllocSite {
  enum class Kind : std::uint8_t { Statement, EntryReceiver };
  Kind kind = Kind::Statement;
  std::uint32_t id = kNoId;  // StmtId, or ClassId for entry receivers

  static AllocSite statement(StmtId s) { return {Kind::Statement, s}; }
  static AllocSite entry_receiver(ClassId c) { return {Kind::EntryReceiver, c}; }
  auto operator<=>(const AllocSite&) const = default;
};

struct ObjectPointer {
  AllocSite site;
  Context ctx;
  auto operator<=>(const ObjectPointer&) const = default;
};

struct KontAddr {
  StmtId site = kNoId;  // kNoId: the initial continuation address ka0
  MethodId callee = kNoId;
  Context ctx;

  static KontAddr initial() { return {}; }
  bool is_initial() const { return site == kNoId; }
  auto operator<=>(const KontAddr&) const = default;
};

struct RegAddr {
  FramePointer fp;
  std::string reg;
  auto operator<=>(const RegAddr&) const = default;
};

struct FieldAddr {
  ObjectPointer op;
  std::string field;
  auto operator<=>(const FieldAddr&) const = default;
};

using Addr = std::variant<RegAddr, FieldAddr, KontAddr>;

namespace atom {

struct Null {
  auto operator<=>(const Null&) const = default;
};
struct Void {
  auto operator<=>(const Void&) const = default;
};
// Flat lattices: an empty optional is Top.
struct Bool {
  std::optional<bool> value;
  bool is_top() const { return !value; }
  auto operator<=>(const Bool&) const = default;
};
struct Int {
  std::optional<std::int64_t> value;
  bool is_top() const { return !value; }
  auto operator<=>(const Int&) const = default;
};
struct Str {
  std::optional<std::string> value;
  bool is_top() const { return !value; }
  auto operator<=>(const Str&) const = default;
};
struct Object {
  ObjectPointer ptr;
  ClassId cls = kNoId;
  auto operator<=>(const Object&) const = default;
};
// Resolved target recorded on a reflective Method object.
struct Method {
  MethodId method = kNoId;
  auto operator<=>(const Method&) const = default;
};
struct Fun {
  FramePointer fp;
  Code resume;
  KontAddr next;
  auto operator<=>(const Fun&) const = default;
};
struct Halt {
  auto operator<=>(const Halt&) const = default;
};

}  // namespace atom

using Atom = std::variant<atom::Null, atom::Void, atom::Bool, atom::Int, atom::Str, atom::Object, atom::Method,
                          atom::Fun, atom::Halt>;

inline Atom top_int() { return atom::Int{}; }
inline Atom top_bool() { return atom::Bool{}; }
inline Atom top_string() { return atom::Str{}; }
inline Atom exact_int(std::int64_t v) { return atom::Int{v}; }
inline Atom exact_bool(bool v) { return atom::Bool{v}; }
inline Atom exact_string(std::string v) { return atom::Str{std::move(v)}; }

bool atom_leq(const Atom& a, const Atom& b);

// Finite set of atoms kept in normal form: sorted, duplicate-free, and
// with at most one element from each flat lattice (Int, Str, Bool).
class AbstractValue {
 public:
  AbstractValue() = default;
  AbstractValue(std::initializer_list<Atom> atoms);

  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  bool insert(const Atom& a);
  bool join(const AbstractValue& other);
  bool leq(const AbstractValue& other) const;
  bool contains(const Atom& a) const;

  template <class T>
  std::vector<T> select() const {
    std::vector<T> out;
    for (const auto& a : atoms_)
      if (auto p = std::get_if<T>(&a)) out.push_back(*p);
    return out;
  }

  auto operator<=>(const AbstractValue&) const = default;

 private:
  std::vector<Atom> atoms_;
};

AbstractValue join(AbstractValue a, const AbstractValue& b);

// Finite partial map Addr -> AbstractValue. Empty images are never stored,
// so structural equality coincides with lattice equality.
class Store {
 public:
  using Map = std::map<Addr, AbstractValue>;

  const AbstractValue& lookup(const Addr& a) const;
  bool contains(const Addr& a) const { return bindings_.count(a) != 0; }
  bool join_at(const Addr& a, const AbstractValue& v);
  bool join(const Store& other);
  bool leq(const Store& other) const;

  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }
  const Map& bindings() const { return bindings_; }

  bool operator==(const Store&) const = default;

 private:
  Map bindings_;
};

Store join(Store a, const Store& b);
inline bool store_leq(const Store& a, const Store& b) { return a.leq(b); }

// Store-free part of a machine state.
struct Config {
  Code code;
  FramePointer fp;
  KontAddr ka;
  auto operator<=>(const Config&) const = default;
};

struct AbstractState {
  Config config;
  std::shared_ptr<const Store> store;

  const Store& sigma() const { return *store; }
  friend bool operator==(const AbstractState& a, const AbstractState& b) {
    return a.config == b.config && *a.store == *b.store;
  }
  friend bool operator<(const AbstractState& a, const AbstractState& b) {
    if (a.config != b.config) return a.config < b.config;
    return a.store->bindings() < b.store->bindings();
  }
};

}  // namespace oobc
