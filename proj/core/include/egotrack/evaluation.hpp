#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egotrack/geometry.hpp"
#include "egotrack/tracking.hpp"

namespace egotrack {

using InstanceId = int;

enum class MotionState { kStationary, kDynamic };

struct StationaryInterval {
  FrameIndex start = 0;  // inclusive
  FrameIndex end = 0;    // inclusive
  Point3 center = Point3::Zero();
};

struct GroundTruthInstance {
  InstanceId id = 0;
  std::vector<StationaryInterval> stationary_intervals;
  /// One state per frame of the sequence.
  std::vector<MotionState> motion;
  /// Sparse 2D boxes on annotated frames where the instance is visible.
  std::map<FrameIndex, BBox> boxes_2d;
  /// Visibility on annotated frames.
  std::map<FrameIndex, bool> visibility;

  std::optional<Point3> stationary_center(FrameIndex frame) const;
  bool is_stationary(FrameIndex frame) const;
  /// Frame -> center over every stationary interval.
  std::map<FrameIndex, Point3> stationary_track() const;

  /// Throws kValidation on overlapping/unordered intervals, intervals not covered by
  /// stationary motion state, or degenerate boxes. With `intr`, boxes must lie inside the image.
  void validate(const CameraIntrinsics* intr = nullptr) const;
};

struct EvalConfig {
  std::vector<double> thresholds{0.25, 0.5, 0.75, 1.0, 1.5};
  bool identity_aware = false;
  bool evaluate_stationary_only = true;

  void validate() const;
};

struct ThresholdCounts {
  double tau = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  /// Empty when there were no predictions (0/0).
  std::optional<double> precision() const;
  /// Empty when there was no ground truth (0/0).
  std::optional<double> recall() const;

  ThresholdCounts& operator+=(const ThresholdCounts& other);
  friend bool operator==(const ThresholdCounts&, const ThresholdCounts&) = default;
};

/// Running sums for L2 / angular error over paired frames; merge is associative.
struct ErrorAccumulator {
  double sum_l2 = 0.0;
  double sum_angular = 0.0;
  std::size_t count = 0;

  std::optional<double> mean_l2() const;
  std::optional<double> mean_angular() const;
  ErrorAccumulator& operator+=(const ErrorAccumulator& other);
};

struct Metrics2D {
  double auc = 0.0;
  double precision = 0.0;
  double normalized_precision = 0.0;
  std::size_t frames = 0;

  friend bool operator==(const Metrics2D&, const Metrics2D&) = default;
};

struct MetricsReport {
  std::vector<ThresholdCounts> per_threshold;
  std::optional<double> mean_l2;
  std::optional<double> mean_angular;
  std::size_t paired_count = 0;
  std::optional<Metrics2D> tracking_2d;

  const ThresholdCounts* at_threshold(double tau) const;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct LabeledPoint {
  InstanceId id = 0;
  Point3 position = Point3::Zero();
};

struct FrameMatch {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<InstanceId, InstanceId>> pairs;  // (gt id, pred id)
};

/// One-to-one matching at threshold `tau`. Identity-agnostic mode is greedy by ascending
/// distance (ties by gt id, then pred id). Throws kDuplicateId on repeated ids within a side.
FrameMatch match_frame(std::span<const LabeledPoint> gts, std::span<const LabeledPoint> preds,
                       double tau, bool identity_aware);

/// Exhaustive maximum-cardinality matching (then minimum total distance) for up to 8 per side.
/// Test oracle for match_frame; throws kSizeLimit beyond 8.
FrameMatch oracle_match_frame(std::span<const LabeledPoint> gts, std::span<const LabeledPoint> preds,
                              double tau);

/// Predicted trajectories keyed by the instance they track.
using TrajectorySet = std::map<InstanceId, Trajectory>;

struct SequenceInput {
  FrameIndex frame_count = 0;
  std::span<const GroundTruthInstance> ground_truth;
  const TrajectorySet* predictions = nullptr;
  std::span<const CameraPose> poses;  // indexed by frame
};

/// Micro-averaged TP/FP/FN per threshold across every evaluated frame and instance.
/// Throws kFrameMismatch for predictions outside [0, frame_count) and kValidation for
/// predictions of unknown instances.
std::vector<ThresholdCounts> accumulate_pr(std::span<const SequenceInput> sequences, const EvalConfig& cfg);

/// L2 and angular error over frames where both gt and prediction exist.
ErrorAccumulator paired_errors(const std::map<FrameIndex, Point3>& gt, const Trajectory& pred,
                               std::span<const CameraPose> poses);

/// Full 3D report: P/R per threshold plus paired errors over all instances.
MetricsReport evaluate(std::span<const SequenceInput> sequences, const EvalConfig& cfg);

/// IoU thresholds 0, 0.05, ..., 1.0 (success iff IoU >= threshold).
inline constexpr int kSuccessThresholdCount = 21;
inline constexpr double kCenterErrorThresholdPx = 20.0;
inline constexpr double kNormalizedCenterThreshold = 0.2;

/// Pools per-frame 2D outcomes; absent predictions fail every criterion.
class Tracking2DAccumulator {
 public:
  void add(const std::optional<BBox>& pred, const BBox& gt);
  Metrics2D result() const;

 private:
  std::size_t frames_ = 0;
  std::size_t center_hits_ = 0;
  std::size_t normalized_hits_ = 0;
  std::array<std::size_t, kSuccessThresholdCount> success_{};
};

Metrics2D metrics_2d(const std::map<FrameIndex, BBox>& pred, const std::map<FrameIndex, BBox>& gt);

/// Plain-text table: precision/recall per threshold, then mean L2 and angle.
std::string format_report_table(const MetricsReport& report);

}  // namespace egotrack
