#include "oobc/codec.hpp"

#include <cstdio>

namespace oobc {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::string method_name(const ClassTable& ct, MethodId m) {
  return m == kNoId ? std::string("?") : ct.method(m).qualified;
}

std::string site_label(const ClassTable& ct, const AllocSite& site) {
  if (site.kind == AllocSite::Kind::EntryReceiver) return "entry:" + ct.cls(site.id).name;
  return ct.site_name(site.id);
}

Json context_json(const ClassTable& ct, const Context& ctx) {
  Json out = Json::array();
  for (StmtId s : ctx) out.push_back(ct.site_name(s));
  return out;
}

}  // namespace

std::string describe(const ClassTable& ct, const Code& code) {
  if (code.is_halted()) return "halt";
  std::string body = code.method == kNoId ? std::string("?") : ct.method(code.method).qualified + "#" + std::to_string(code.pc);
  if (code.prelude != kNoId) {
    return ct.site_name(ct.cls(code.prelude).prelude_first + code.prelude_pc) + ">" + body;
  }
  return body;
}

std::string describe(const ClassTable& ct, const Context& ctx) {
  std::string out = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out += ",";
    out += ct.site_name(ctx[i]);
  }
  return out + "]";
}

std::string describe(const ClassTable& ct, const FramePointer& fp) {
  if (fp.is_initial()) return "fp0";
  return method_name(ct, fp.method) + describe(ct, fp.ctx);
}

std::string describe(const ClassTable& ct, const ObjectPointer& op) {
  return site_label(ct, op.site) + describe(ct, op.ctx);
}

std::string describe(const ClassTable& ct, const KontAddr& ka) {
  if (ka.is_initial()) return "ka0";
  return ct.site_name(ka.site) + "->" + method_name(ct, ka.callee) + describe(ct, ka.ctx);
}

std::string describe(const ClassTable& ct, const Addr& addr) {
  return std::visit(
      [&](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RegAddr>) {
          return "(" + describe(ct, a.fp) + "," + a.reg + ")";
        } else if constexpr (std::is_same_v<T, FieldAddr>) {
          return "(" + describe(ct, a.op) + "." + a.field + ")";
        } else {
          return describe(ct, a);
        }
      },
      addr);
}

std::string describe(const ClassTable& ct, const Atom& a) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, atom::Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, atom::Void>) {
          return "void";
        } else if constexpr (std::is_same_v<T, atom::Bool>) {
          return v.value ? (*v.value ? "true" : "false") : "TopBool";
        } else if constexpr (std::is_same_v<T, atom::Int>) {
          return v.value ? std::to_string(*v.value) : "TopInt";
        } else if constexpr (std::is_same_v<T, atom::Str>) {
          return v.value ? quote_string(*v.value) : "TopString";
        } else if constexpr (std::is_same_v<T, atom::Object>) {
          return "obj(" + describe(ct, v.ptr) + "," + ct.cls(v.cls).name + ")";
        } else if constexpr (std::is_same_v<T, atom::Method>) {
          return "method(" + method_name(ct, v.method) + ")";
        } else if constexpr (std::is_same_v<T, atom::Fun>) {
          return "fun(" + describe(ct, v.fp) + "," + describe(ct, v.resume) + "," + describe(ct, v.next) + ")";
        } else {
          return "halt";
        }
      },
      a);
}

std::string describe(const ClassTable& ct, const AbstractValue& v) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : v) {
    if (!first) out += ", ";
    first = false;
    out += describe(ct, a);
  }
  return out + "}";
}

std::string config_key(const ClassTable& ct, const Config& c) {
  return describe(ct, c.code) + "|" + describe(ct, c.fp) + "|" + describe(ct, c.ka);
}

Json to_json(const ClassTable& ct, const FramePointer& fp) {
  if (fp.is_initial()) return Json{{"tag", "fp0"}};
  return Json{{"tag", "fp"}, {"method", method_name(ct, fp.method)}, {"ctx", context_json(ct, fp.ctx)}};
}

Json to_json(const ClassTable& ct, const ObjectPointer& op) {
  return Json{{"tag", "op"}, {"site", site_label(ct, op.site)}, {"ctx", context_json(ct, op.ctx)}};
}

Json to_json(const ClassTable& ct, const KontAddr& ka) {
  if (ka.is_initial()) return Json{{"tag", "ka0"}};
  return Json{{"tag", "ka"},
              {"site", ct.site_name(ka.site)},
              {"callee", method_name(ct, ka.callee)},
              {"ctx", context_json(ct, ka.ctx)}};
}

Json to_json(const ClassTable& ct, const Addr& addr) {
  return std::visit(
      [&](const auto& a) -> Json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RegAddr>) {
          return Json{{"tag", "reg"}, {"fp", to_json(ct, a.fp)}, {"reg", a.reg}};
        } else if constexpr (std::is_same_v<T, FieldAddr>) {
          return Json{{"tag", "field"}, {"op", to_json(ct, a.op)}, {"field", a.field}};
        } else {
          return Json{{"tag", "kont"}, {"ka", to_json(ct, a)}};
        }
      },
      addr);
}

Json to_json(const ClassTable& ct, const Atom& a) {
  return std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, atom::Null>) {
          return Json{{"tag", "null"}};
        } else if constexpr (std::is_same_v<T, atom::Void>) {
          return Json{{"tag", "void"}};
        } else if constexpr (std::is_same_v<T, atom::Bool>) {
          return v.value ? Json{{"tag", "bool"}, {"value", *v.value}} : Json{{"tag", "bool"}, {"top", true}};
        } else if constexpr (std::is_same_v<T, atom::Int>) {
          return v.value ? Json{{"tag", "int"}, {"value", *v.value}} : Json{{"tag", "int"}, {"top", true}};
        } else if constexpr (std::is_same_v<T, atom::Str>) {
          return v.value ? Json{{"tag", "str"}, {"value", *v.value}} : Json{{"tag", "str"}, {"top", true}};
        } else if constexpr (std::is_same_v<T, atom::Object>) {
          return Json{{"tag", "obj"}, {"op", to_json(ct, v.ptr)}, {"class", ct.cls(v.cls).name}};
        } else if constexpr (std::is_same_v<T, atom::Method>) {
          return Json{{"tag", "method"}, {"method", method_name(ct, v.method)}};
        } else if constexpr (std::is_same_v<T, atom::Fun>) {
          return Json{{"tag", "fun"},
                      {"fp", to_json(ct, v.fp)},
                      {"code", describe(ct, v.resume)},
                      {"ka", to_json(ct, v.next)}};
        } else {
          return Json{{"tag", "halt"}};
        }
      },
      a);
}

Json to_json(const ClassTable& ct, const AbstractValue& v) {
  Json out = Json::array();
  for (const auto& a : v) out.push_back(to_json(ct, a));
  return out;
}

Json to_json(const ClassTable& ct, const Store& s) {
  Json out = Json::array();
  for (const auto& [addr, value] : s) out.push_back(Json::array({to_json(ct, addr), to_json(ct, value)}));
  return out;
}

std::string store_digest(const ClassTable& ct, const Store& s) {
  std::string text;
  for (const auto& [addr, value] : s) {
    text += describe(ct, addr);
    text += "=";
    text += describe(ct, value);
    text += ";";
  }
  return hex64(fnv1a64(text));
}

}  // namespace oobc
