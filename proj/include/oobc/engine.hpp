#pragma once

// Reachable-state exploration. The default explorer steps the whole
// frontier in parallel against a snapshot of the store and commits the
// results serially in state-key order, so the graph and store it produces
// do not depend on the number of workers. `explore_serial` is the plain
// worklist algorithm, kept as a reference for tests.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oobc/machine.hpp"
#include "oobc/predicates.hpp"

namespace oobc {

struct EntryPoint {
  enum class Reason { Annotated, Lifecycle, Explicit };

  std::string class_name;
  std::string method_name;
  Reason reason = Reason::Explicit;
  MethodId method = kNoId;

  std::string qualified() const { return class_name + "/" + method_name; }
};

std::string_view entry_reason_name(EntryPoint::Reason r);

std::vector<std::string> default_lifecycle();

struct EntryConfig {
  std::vector<std::string> lifecycle = default_lifecycle();
  std::vector<std::string> explicit_entries;  // "C/m"
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Public lifecycle-named methods of application classes plus explicit
// entries, in class order then method order. Throws ConfigError for an
// explicit entry that does not resolve.
std::vector<EntryPoint> find_entry_points(const ClassTable& ct, const EntryConfig& config,
                                          std::vector<std::string>* warnings = nullptr);

struct ExploreOptions {
  AllocationPolicy policy;
  bool widen = true;
  bool gc = false;  // ignored when widening
  std::optional<std::size_t> cutoff;  // max committed steps per exploration
  std::shared_ptr<const PredicateProgram> predicates;
  int workers = 1;  // 0: OpenMP default
  bool single_pass = false;
  bool reference = false;  // use explore_serial
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string rule;
  auto operator<=>(const Edge&) const = default;
};

struct Node {
  std::string id;
  std::string key;
  Config config;
  std::shared_ptr<const Store> store;  // the shared store when widened
  std::vector<AnalysisEvent> events;   // from the node's last step
  bool root = false;
  bool truncated = false;
  std::size_t visits = 0;  // times stepped
};

struct StateGraph {
  std::vector<Node> nodes;  // sorted by key once finalized
  std::vector<Edge> edges;  // sorted, duplicate-free

  std::optional<std::size_t> find(const std::string& key) const;
  std::optional<std::size_t> find_id(const std::string& id) const;
  std::size_t truncated_count() const;
};

struct ExploreResult {
  StateGraph graph;
  Store store;  // widened store, or the join over all node stores
  std::size_t steps = 0;
  bool cutoff_hit = false;
  bool truncated = false;
};

// Restriction of `s` to addresses reachable from the registers of c.fp and
// from c.ka, closing over object fields and continuation frames.
Store abstract_gc(const Config& c, const Store& s);

ExploreResult explore(const ClassTable& ct, MethodId entry, const Store& initial, const ExploreOptions& options);
ExploreResult explore_serial(const ClassTable& ct, MethodId entry, const Store& initial,
                             const ExploreOptions& options);

struct AnalysisResult {
  const ClassTable* ct = nullptr;
  ExploreOptions options;
  std::vector<EntryPoint> entries;
  StateGraph graph;
  Store store;
  std::size_t passes = 0;
  std::size_t steps = 0;
  bool cutoff_hit = false;
  bool truncated = false;
  std::vector<std::string> warnings;

  bool incomplete() const { return cutoff_hit || truncated; }
};

// Explores each entry in order, threading the store from one to the next,
// and repeats the sweep until a full pass leaves the store unchanged (one
// sweep with single_pass or a single entry).
AnalysisResult analyze_all_entries(const ClassTable& ct, const std::vector<EntryPoint>& entries,
                                   const ExploreOptions& options);

}  // namespace oobc
