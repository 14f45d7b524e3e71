#include "scenarios.hpp"

namespace egotrack::testing {

SimulatedRun simulate(const SceneSpec& spec) {
  SimulatedRun run;
  run.spec = spec;
  run.frames = generate_scene(spec);
  run.dataset = to_dataset(spec, run.frames);
  return run;
}

cli::TrackOptions mvpe_options(const TrackerConfig& tracker, int views) {
  cli::TrackOptions opt;
  opt.mode = EnrollmentMode::kMvpe;
  opt.views = views;
  opt.tracker = tracker;
  return opt;
}

SceneSpec look_away_scene(std::uint64_t seed) {
  SceneSpec s = presets::standard(seed);
  // Alternate between the table and the side walls.
  s.waypoints = {{{0.0, -2.0, 1.5}, {0.0, 0.0, 0.8}},  {{0.0, -2.0, 1.5}, {-3.0, -2.5, 1.0}},
                 {{0.2, -2.0, 1.5}, {0.0, 0.0, 0.8}},  {{0.2, -2.0, 1.5}, {3.0, -2.5, 1.0}},
                 {{0.0, -1.9, 1.5}, {0.0, 0.0, 0.8}},  {{0.0, -1.9, 1.5}, {-3.0, -1.0, 1.0}},
                 {{-0.2, -2.0, 1.5}, {0.0, 0.1, 0.8}}};
  s.lookalikes_per_frame = 2;
  s.lookalike_similarity_min = 0.7;
  s.lookalike_similarity_max = 0.95;
  s.embedding_noise = 0.08;
  return s;
}

SceneSpec noisy_views_scene(std::uint64_t seed) {
  SceneSpec s = presets::standard(seed);
  s.embedding_noise = 0.08;
  s.mvpe_view_noise = 0.25;
  s.mvpe_views = 5;
  return s;
}

TrajectorySet scripted_imperfect_tracker(const Dataset& ds) {
  TrajectorySet out;
  for (const auto& gt : ds.annotations) {
    Trajectory traj;
    std::optional<Point3> last;
    for (FrameIndex f = 0; f < ds.frame_count(); ++f) {
      if (const auto c = gt.stationary_center(f)) last = *c;
      if (!last || f % 11 == 3) continue;
      Point3 p = *last;
      p.x() += 0.0625 * static_cast<double>(f % 5);
      p.y() -= 0.03125 * static_cast<double>((3 * f) % 7);
      p.z() += 0.001 * static_cast<double>(f) / 8.0;
      if (f % 17 == 0) p.x() += 2.0;
      traj.entries[f] = {p, f % 2 == 0 ? Provenance::kFreshDetection : Provenance::kMemoryCarry};
    }
    out[gt.id] = std::move(traj);
  }
  return out;
}

bool monotone_in_threshold(const MetricsReport& report) {
  for (std::size_t i = 1; i < report.per_threshold.size(); ++i) {
    const auto& a = report.per_threshold[i - 1];
    const auto& b = report.per_threshold[i];
    if (b.tp < a.tp || b.fn > a.fn) return false;
  }
  return true;
}

}  // namespace egotrack::testing
