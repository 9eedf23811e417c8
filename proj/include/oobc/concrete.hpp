#pragma once

// Concrete CESK* interpreter. Pointers are fresh counters, but each carries
// the full (unbounded) call-site history of its allocation so that the
// abstraction map can truncate it to any k and compare against the
// abstract machine's tokens.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oobc/codec.hpp"
#include "oobc/domain.hpp"

namespace oobc::concrete {

using Id = std::uint64_t;

namespace value {
struct Null {
  auto operator<=>(const Null&) const = default;
};
struct Void {
  auto operator<=>(const Void&) const = default;
};
struct Ref {
  Id object = 0;
  ClassId cls = kNoId;
  auto operator<=>(const Ref&) const = default;
};
struct MethodRef {
  MethodId method = kNoId;
  auto operator<=>(const MethodRef&) const = default;
};
struct Fun {
  Id frame = 0;
  Code resume;
  Id kont = 0;
  auto operator<=>(const Fun&) const = default;
};
struct Halt {
  auto operator<=>(const Halt&) const = default;
};
}  // namespace value

using Value = std::variant<value::Null, value::Void, bool, std::int64_t, std::string, value::Ref, value::MethodRef,
                           value::Fun, value::Halt>;

struct Reg {
  Id frame = 0;
  std::string name;
  auto operator<=>(const Reg&) const = default;
};
struct Field {
  Id object = 0;
  std::string name;
  auto operator<=>(const Field&) const = default;
};
struct Kont {
  Id kont = 0;
  auto operator<=>(const Kont&) const = default;
};

using Address = std::variant<Reg, Field, Kont>;
using Heap = std::map<Address, Value>;

// Allocation records. Entry frames and entry continuations are `initial`.
struct FrameInfo {
  bool initial = false;
  MethodId method = kNoId;
  Context history;
};
struct ObjectInfo {
  AllocSite site;
  Context history;
};
struct KontInfo {
  bool initial = false;
  StmtId site = kNoId;
  MethodId callee = kNoId;
  Context history;
};

struct Allocations {
  std::map<Id, FrameInfo> frames;
  std::map<Id, ObjectInfo> objects;
  std::map<Id, KontInfo> konts;
};

struct ConcreteState {
  Code code;
  Id frame = 0;
  Id kont = 0;
  std::shared_ptr<const Heap> store;
};

enum class Termination { Halted, Error, FuelExhausted };

std::string_view termination_name(Termination t);

struct Trace {
  MethodId entry = kNoId;
  std::vector<ConcreteState> states;
  Termination termination = Termination::Halted;
  std::string error;
};

struct Run {
  Allocations allocations;
  std::vector<Trace> traces;  // one per entry, in order
};

// Runs each entry to completion (or fuel exhaustion) in turn over a shared
// heap. Entry parameters get their type's default value; an instance entry
// runs on one receiver object per class, shared between entries.
Run run_concrete(const ClassTable& ct, const std::vector<MethodId>& entries, std::size_t fuel);
Run run_concrete(const ClassTable& ct, MethodId entry, std::size_t fuel);

// Maps concrete pointers to abstract tokens for a given context depth.
class PointerMap {
 public:
  PointerMap(const Allocations& allocations, std::size_t k) : allocs_(&allocations), k_(k) {}

  FramePointer frame(Id id) const;
  ObjectPointer object(Id id) const;
  KontAddr kont(Id id) const;
  Addr address(const Address& a) const;
  Atom value(const Value& v) const;

 private:
  Context truncate(const Context& c) const;
  const Allocations* allocs_;
  std::size_t k_;
};

enum class Scope { AllBindings, Reachable };

// Bindings reachable from the state's frame registers and continuation.
Heap reachable(const ConcreteState& s);

// Codes equal, frame and continuation map to the abstract ones, and every
// concrete binding in scope is below the abstract image at its mapped address.
bool abstracts(const Config& abs, const Store& abs_store, const ConcreteState& conc, const PointerMap& pm,
               Scope scope = Scope::AllBindings);

Json to_json(const ClassTable& ct, const Run& run);

}  // namespace oobc::concrete
