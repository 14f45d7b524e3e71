#include <benchmark/benchmark.h>

#include "egotrack/geometry.hpp"
#include "egotrack/random.hpp"

namespace {

using namespace egotrack;

const CameraIntrinsics kIntr{500.0, 500.0, 320.0, 240.0, 640, 480};

void BM_LiftToWorld(benchmark::State& state) {
  const CameraPose pose = CameraPose::look_at({1, -2, 1.5}, {0, 0, 0.8}, {0, 0, 1}, 0);
  Rng rng(1);
  std::vector<Point2> pixels;
  for (int i = 0; i < 1024; ++i) pixels.push_back({rng.uniform(0, 639), rng.uniform(0, 479)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lift_to_world(pixels[i++ & 1023], 2.0, kIntr, pose));
  }
}
BENCHMARK(BM_LiftToWorld);

void BM_LiftProjectRoundTrip(benchmark::State& state) {
  const CameraPose pose = CameraPose::look_at({1, -2, 1.5}, {0, 0, 0.8}, {0, 0, 1}, 0);
  for (auto _ : state) {
    const Point3 p = lift_to_world({200.5, 100.25}, 3.0, kIntr, pose);
    benchmark::DoNotOptimize(project_to_pixel(p, kIntr, pose));
  }
}
BENCHMARK(BM_LiftProjectRoundTrip);

void BM_SampleDepthFallback(benchmark::State& state) {
  const int radius = static_cast<int>(state.range(0));
  DepthMap map(640, 480, 2.0f);
  for (int y = 200; y < 280; ++y)
    for (int x = 280; x < 360; x += 2) map.at(x, y) = 0.0f;
  for (auto _ : state) benchmark::DoNotOptimize(sample_depth(map, {320, 240}, radius));
}
BENCHMARK(BM_SampleDepthFallback)->Arg(0)->Arg(2)->Arg(8);

}  // namespace
