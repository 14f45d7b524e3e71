#include <vector>

#include <benchmark/benchmark.h>

#include "egotrack/evaluation.hpp"
#include "egotrack/random.hpp"

namespace {

using namespace egotrack;

std::vector<LabeledPoint> points(Rng& rng, int n, int id_base) {
  std::vector<LabeledPoint> out;
  for (int i = 0; i < n; ++i) out.push_back({id_base + i, Point3(rng.uniform(0, 3), rng.uniform(0, 3), 1)});
  return out;
}

void BM_MatchFrame(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  Rng rng(4);
  const auto gts = points(rng, n, 0);
  const auto preds = points(rng, n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(match_frame(gts, preds, 0.5, false));
}
BENCHMARK(BM_MatchFrame)->Arg(2)->Arg(8)->Arg(32);

void BM_OracleMatchFrame(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  Rng rng(5);
  const auto gts = points(rng, n, 0);
  const auto preds = points(rng, n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_match_frame(gts, preds, 0.5));
}
BENCHMARK(BM_OracleMatchFrame)->Arg(2)->Arg(4)->Arg(6);

}  // namespace
