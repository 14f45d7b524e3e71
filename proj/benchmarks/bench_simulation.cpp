#include <benchmark/benchmark.h>

#include "egotrack/simulation.hpp"

namespace {

using namespace egotrack;

void BM_GenerateScene(benchmark::State& state) {
  SceneSpec spec = presets::standard(1);
  spec.frame_count = 60;
  for (auto& inst : spec.instances) {
    std::erase_if(inst.schedule, [](const Placement& p) { return p.start >= 60; });
    for (auto& p : inst.schedule) p.end = std::min<FrameIndex>(p.end, 59);
  }
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_scene(spec, threads));
  state.SetItemsProcessed(state.iterations() * spec.frame_count);
}
BENCHMARK(BM_GenerateScene)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
