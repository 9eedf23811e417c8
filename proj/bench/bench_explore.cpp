// Serial reference explorer vs the parallel frontier explorer, on a
// generated program whose virtual call fans out to many receiver classes.

#include <benchmark/benchmark.h>

#include <sstream>

#include "oobc/engine.hpp"

namespace {

std::string generate(int classes) {
  std::ostringstream p;
  p << "(class bench/Base extends java/lang/Object ((field public acc int) (field public next bench/Base))\n"
       "  ((method public work (int) int (throws) (limit 1) (return p0))\n"
       "   (method public static helper (int) int (throws) (limit 1) (return (add p0 1)))))\n";
  for (int i = 0; i < classes; ++i) {
    p << "(class bench/W" << i << " extends bench/Base ()\n"
      << "  ((method public work (int) int (throws) (limit 6)\n"
         "     (assign i 0)\n"
         "     (assign s p0)\n"
         "     (label top)\n"
         "     (if (not (lt i " << (i % 5) + 2 << ")) (goto done))\n"
         "     (assign s (invoke-static bench/Base/helper (s) (int)))\n"
         "     (assign n (new bench/Base))\n"
         "     (field-put n next this)\n"
         "     (field-put this acc s)\n"
         "     (assign i (add i 1))\n"
         "     (goto top)\n"
         "     (label done)\n"
         "     (field-get a this acc)\n"
         "     (return (add a s)))))\n";
  }
  p << "(class bench/Main extends java/lang/Object ()\n"
       "  ((method public onCreate () int (throws) (limit 4)\n";
  for (int i = 0; i < classes; ++i) p << "     (assign o (new bench/W" << i << "))\n";
  p << "     (assign r (invoke-virtual bench/Base/work (o 3) (int)))\n"
       "     (assign r2 (invoke-virtual bench/Base/work (o r) (int)))\n"
       "     (return r2))))\n";
  return p.str();
}

struct Fixture {
  std::shared_ptr<const oobc::ClassTable> ct;
  std::vector<oobc::EntryPoint> entries;

  explicit Fixture(int classes) : ct(oobc::ClassTable::from_source(generate(classes))) {
    entries = oobc::find_entry_points(*ct, oobc::EntryConfig{});
  }
};

const Fixture& fixture() {
  static const Fixture f(12);
  return f;
}

oobc::ExploreOptions options(bool widen, std::size_t k) {
  oobc::ExploreOptions o;
  o.policy = oobc::AllocationPolicy::with_k(k);
  o.widen = widen;
  return o;
}

void report(benchmark::State& state, const oobc::AnalysisResult& r) {
  state.counters["nodes"] = static_cast<double>(r.graph.nodes.size());
  state.counters["steps"] = static_cast<double>(r.steps);
}

void BM_Serial(benchmark::State& state) {
  const auto& f = fixture();
  auto o = options(state.range(0) != 0, static_cast<std::size_t>(state.range(1)));
  o.reference = true;
  oobc::AnalysisResult r;
  for (auto _ : state) {
    r = oobc::analyze_all_entries(*f.ct, f.entries, o);
    benchmark::DoNotOptimize(r.graph.nodes.data());
  }
  report(state, r);
}

void BM_Parallel(benchmark::State& state) {
  const auto& f = fixture();
  auto o = options(state.range(0) != 0, static_cast<std::size_t>(state.range(1)));
  o.workers = static_cast<int>(state.range(2));
  oobc::AnalysisResult r;
  for (auto _ : state) {
    r = oobc::analyze_all_entries(*f.ct, f.entries, o);
    benchmark::DoNotOptimize(r.graph.nodes.data());
  }
  report(state, r);
}

// Args: widen, k[, workers]
BENCHMARK(BM_Serial)->ArgNames({"widen", "k"})->Args({1, 1})->Args({0, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)
    ->ArgNames({"widen", "k", "workers"})
    ->ArgsProduct({{1, 0}, {1}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
