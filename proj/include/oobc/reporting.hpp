#pragma once

// Outputs computed from a finished analysis. Everything here is a pure
// function of the result, so the text produced is reproducible byte for byte.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oobc/codec.hpp"
#include "oobc/engine.hpp"

namespace oobc {

inline constexpr int kExportSchemaVersion = 1;

class LoadError : public std::runtime_error {
 public:
  LoadError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// API qualified name -> permissions it requires.
struct PermissionMap {
  std::map<std::string, std::set<std::string>> apis;
};

// `api<TAB>PERMISSION` per line; blank lines and `#` comments are skipped.
PermissionMap parse_permission_map(std::string_view text);
// One permission per line, `#` comments allowed.
std::set<std::string> parse_manifest(std::string_view text);

std::string read_file(const std::string& path);

struct PermissionFinding {
  enum class Kind { UnusedPermission, MissingPermission };

  Kind kind = Kind::UnusedPermission;
  std::string permission;
  std::optional<std::string> api;    // witness API for missing permissions
  std::optional<std::string> state;  // node id of a state making the call

  bool operator==(const PermissionFinding&) const = default;
};

std::string_view finding_kind_name(PermissionFinding::Kind k);

std::vector<PermissionFinding> permission_report(const AnalysisResult& result, const std::set<std::string>& declared,
                                                 const PermissionMap& pm);

struct ApiDumpEntry {
  std::string api;
  std::size_t call_sites = 0;
  std::vector<std::string> witnesses;  // node ids, sorted

  bool operator==(const ApiDumpEntry&) const = default;
};

std::vector<ApiDumpEntry> api_dump(const AnalysisResult& result);
std::string api_dump_text(const std::vector<ApiDumpEntry>& dump);

struct HeatEntry {
  std::string method;
  std::uint32_t index = 0;
  std::optional<std::int64_t> line;  // nearest preceding (line n) directive
  SourcePos pos;
  std::size_t states = 0;    // distinct nodes headed by the statement
  std::size_t revisits = 0;  // times those nodes were stepped
};

// One entry per statement of every method declared in the program text.
std::vector<HeatEntry> heat_map(const AnalysisResult& result);
std::string heat_map_text(const std::vector<HeatEntry>& heat);

std::vector<StateVerdict> compute_verdicts(const AnalysisResult& result, const PredicateProgram* pp);

std::string export_dot(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts);

Json export_json_value(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts,
                       const std::vector<PermissionFinding>& findings = {});
std::string export_json(const AnalysisResult& result, const std::vector<StateVerdict>& verdicts,
                        const std::vector<PermissionFinding>& findings = {});

std::string findings_text(const std::vector<PermissionFinding>& findings);

}  // namespace oobc
