#pragma once

// Helpers shared by the unit tests, the acceptance binary and the benchmark:
// corpus access, the soundness oracle, and small random generators.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oobc/class_table.hpp"
#include "oobc/concrete.hpp"
#include "oobc/engine.hpp"
#include "oobc/reporting.hpp"

namespace oobc::testing {

std::string corpus_dir();
std::vector<std::string> corpus_names();  // file names, sorted
std::string corpus_text(const std::string& name);
std::shared_ptr<const ClassTable> load_corpus(const std::string& name);
std::shared_ptr<const ClassTable> load_text(const std::string& text);

std::vector<EntryPoint> default_entries(const ClassTable& ct);
AnalysisResult analyze(const ClassTable& ct, const ExploreOptions& options);
AnalysisResult analyze(const ClassTable& ct, const std::vector<EntryPoint>& entries, const ExploreOptions& options);

ExploreOptions options_for(std::size_t k, bool widen, bool gc = false);

struct SoundnessReport {
  std::size_t concrete_states = 0;
  std::size_t abstract_states = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Runs the entries on the concrete interpreter and checks every visited
// state against the nodes of the analysis.
SoundnessReport check_soundness(const ClassTable& ct, const std::vector<EntryPoint>& entries,
                                const AnalysisResult& result, std::size_t fuel = 500);
SoundnessReport check_soundness(const ClassTable& ct, const ExploreOptions& options, std::size_t fuel = 500);

// Program in which the string object built by the n-th const-string
// (in source order) has its contents joined with a second literal, so the
// analysis sees {TopString}. Returns nullopt if there is no such statement.
std::optional<std::string> with_top_string(const Program& program, std::size_t n);
std::size_t const_string_count(const Program& program);

// Literal of the n-th const-string, and whether it feeds a reflective
// lookup (forName or getMethod) in the same method.
std::string const_string_literal(const Program& program, std::size_t n);
bool const_string_is_reflective(const Program& program, std::size_t n);

// Random generators over a small universe, so joins collide often.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return below(2) == 0; }

  Atom atom();
  AbstractValue value(std::size_t max_atoms = 4);
  Addr addr();
  Store store(std::size_t max_bindings = 6);

 private:
  std::mt19937_64 rng_;
};

}  // namespace oobc::testing
