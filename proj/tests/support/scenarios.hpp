#pragma once

#include <cstdint>
#include <vector>

#include "commands.hpp"
#include "egotrack/dataio.hpp"
#include "egotrack/evaluation.hpp"
#include "egotrack/simulation.hpp"

namespace egotrack::testing {

struct SimulatedRun {
  SceneSpec spec;
  std::vector<FrameBundle> frames;
  Dataset dataset;
};

SimulatedRun simulate(const SceneSpec& spec);

/// MVPE tracking with the given tracker settings (all views).
cli::TrackOptions mvpe_options(const TrackerConfig& tracker = {}, int views = 5);

/// Scene where the camera periodically turns away from the table, with look-alike clutter
/// strong enough to cause false matches when the target is out of view.
SceneSpec look_away_scene(std::uint64_t seed);

/// Scene with noisy enrollment views and noisy proposals for the view-count comparison.
SceneSpec noisy_views_scene(std::uint64_t seed);

/// Predictions from ground truth with deterministic defects: dropped frames, offsets that
/// grow with the frame index, and periodic gross outliers.
TrajectorySet scripted_imperfect_tracker(const Dataset& ds);

/// TP non-decreasing and FN non-increasing across the report's thresholds.
bool monotone_in_threshold(const MetricsReport& report);

}  // namespace egotrack::testing
