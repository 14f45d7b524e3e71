#include <vector>

#include <benchmark/benchmark.h>

#include "egotrack/random.hpp"
#include "egotrack/simulation.hpp"
#include "egotrack/tracking.hpp"

namespace {

using namespace egotrack;

Embedding random_unit(Rng& rng, int dim) {
  Embedding e(dim);
  for (int i = 0; i < dim; ++i) e[i] = rng.normal();
  return e.normalized();
}

// Proposal count x embedding dimension.
void BM_MatchProposals(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto dim = static_cast<int>(state.range(1));
  Rng rng(2);
  std::vector<Proposal> proposals;
  for (int i = 0; i < n; ++i) proposals.push_back({{1.0 * i, 0, 1.0 * i + 10, 10}, rng.uniform(), random_unit(rng, dim)});
  const Template tmpl{random_unit(rng, dim), EnrollmentMode::kSvoe, 1};
  for (auto _ : state) benchmark::DoNotOptimize(match_proposals(proposals, tmpl, 0.6));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MatchProposals)->Args({8, 32})->Args({64, 384})->Args({256, 768});

void BM_KalmanStep(benchmark::State& state) {
  const KalmanNoise noise = KalmanNoise::defaults();
  KalmanState s = KalmanState::initialize({0, 0, 1}, noise);
  Rng rng(3);
  std::vector<Point3> zs;
  for (int i = 0; i < 1024; ++i) zs.emplace_back(0.01 * rng.normal(), 0.01 * rng.normal(), 1 + 0.01 * rng.normal());
  std::size_t i = 0;
  for (auto _ : state) {
    s = kalman_step_with_reset(s, zs[i++ & 1023], 0.15, noise.initial_covariance).state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_KalmanStep);

void BM_TrackInstance(benchmark::State& state) {
  const SceneSpec spec = presets::relocation(1, 0.05);
  const auto frames = generate_scene(spec);
  std::vector<FrameObservation> obs;
  for (const auto& b : frames) obs.push_back({b.frame, b.proposals, &b.depth, b.pose, std::nullopt});
  const std::vector<Embedding> views{resolve_embeddings(spec).front()};
  const Template tmpl = make_template(views, EnrollmentMode::kSvoe);
  TrackerConfig cfg;
  cfg.use_kalman = true;
  for (auto _ : state) benchmark::DoNotOptimize(track_instance(obs, tmpl, spec.intrinsics, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(obs.size()));
}
BENCHMARK(BM_TrackInstance);

}  // namespace
