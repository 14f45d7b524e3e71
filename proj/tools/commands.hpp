#pragma once

// Workflows behind the egotrack subcommands, usable without going through argv.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "egotrack/dataio.hpp"
#include "egotrack/evaluation.hpp"
#include "egotrack/simulation.hpp"
#include "egotrack/tracking.hpp"

namespace egotrack::cli {

struct TrackOptions {
  EnrollmentMode mode = EnrollmentMode::kSvoe;
  /// MVPE: use the first `views` enrolled views.
  int views = 5;
  TrackerConfig tracker;
};

/// Template for one instance. SVOE takes the embedding of the enrollment-frame proposal with the
/// highest IoU against the enrollment box; MVPE averages the first `views` views.
/// Returns empty when the instance has no enrollment of the requested kind.
std::optional<Template> instance_template(const Dataset& ds, InstanceId id, const TrackOptions& opt);

/// One trajectory per instance enrolled in the requested mode. SVOE tracking starts at the
/// enrollment frame, MVPE at frame 0. Throws kValidation if nothing is enrolled in that mode.
TrajectorySet track_dataset(const Dataset& ds, const TrackOptions& opt);

/// 3D report for one dataset.
MetricsReport evaluate_dataset(const Dataset& ds, const TrajectorySet& predictions, const EvalConfig& cfg);

struct Guided2DResult {
  Metrics2D unguided;
  Metrics2D guided;
};

/// 2D boxes with and without 3D guidance, pooled over every annotated box of every tracked
/// instance. Unguided picks the most similar proposal; guided picks, among proposals above the
/// threshold, the one nearest the projected trajectory point (unguided when no point projects).
Guided2DResult guided2d_dataset(const Dataset& ds, const TrajectorySet& predictions, const TrackOptions& opt);

std::string format_guided2d(const Guided2DResult& r);
std::string guided2d_to_json(const Guided2DResult& r);

/// Writes a complete dataset to `out_dir` through a sibling staging directory.
Manifest simulate_to_directory(const SceneSpec& spec, const std::filesystem::path& out_dir, unsigned threads,
                               bool overwrite);

/// Full command line. Returns the process exit code: 0 on success, 1 on runtime errors,
/// 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace egotrack::cli
