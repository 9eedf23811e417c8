#pragma once

// Canonical text and JSON renderings of domain values. Every rendering is a
// pure function of the value and the class table, so exports are
// byte-for-byte reproducible.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "oobc/domain.hpp"

namespace oobc {

using Json = nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string describe(const ClassTable& ct, const Code& code);
std::string describe(const ClassTable& ct, const Context& ctx);
std::string describe(const ClassTable& ct, const FramePointer& fp);
std::string describe(const ClassTable& ct, const ObjectPointer& op);
std::string describe(const ClassTable& ct, const KontAddr& ka);
std::string describe(const ClassTable& ct, const Addr& addr);
std::string describe(const ClassTable& ct, const Atom& a);
std::string describe(const ClassTable& ct, const AbstractValue& v);

// Key identifying a configuration: code | fp | ka.
std::string config_key(const ClassTable& ct, const Config& c);

Json to_json(const ClassTable& ct, const FramePointer& fp);
Json to_json(const ClassTable& ct, const ObjectPointer& op);
Json to_json(const ClassTable& ct, const KontAddr& ka);
Json to_json(const ClassTable& ct, const Addr& addr);
Json to_json(const ClassTable& ct, const Atom& a);
// Sorted array of atoms.
Json to_json(const ClassTable& ct, const AbstractValue& v);
// Sorted array of [address, value-set] pairs.
Json to_json(const ClassTable& ct, const Store& s);

// Digest of a store's canonical text, used to key per-state stores.
std::string store_digest(const ClassTable& ct, const Store& s);

}  // namespace oobc
