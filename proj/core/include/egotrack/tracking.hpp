#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "egotrack/geometry.hpp"

namespace egotrack {

using Embedding = Eigen::VectorXd;

/// Tolerance on |‖embedding‖ - 1| for proposals and templates.
inline constexpr double kUnitNormTolerance = 1e-5;

struct Proposal {
  BBox bbox;
  double score = 0.0;
  Embedding embedding;

  /// Throws Error(kValidation) if the box is degenerate or the embedding is not unit norm.
  void validate() const;
};

enum class EnrollmentMode { kSvoe, kMvpe };

struct Template {
  Embedding embedding;
  EnrollmentMode source = EnrollmentMode::kSvoe;
  int view_count = 1;
};

/// Mean of the embeddings, renormalized. SVOE requires exactly one embedding.
Template make_template(std::span<const Embedding> embeddings, EnrollmentMode source);

struct ProposalMatch {
  std::size_t index = 0;  // into the proposal list
  double similarity = 0.0;
};

/// Highest-cosine proposal, or empty when the best similarity is below `cosine_threshold`.
/// Ties go to the higher score, then lower x_min, then lower y_min.
std::optional<ProposalMatch> match_proposals(std::span<const Proposal> proposals,
                                             const Template& tmpl, double cosine_threshold);

/// Among proposals with similarity >= threshold, the one whose box center is nearest to
/// `projected` in pixels.
std::optional<BBox> guided_2d_select(std::span<const Proposal> proposals, const Point2& projected,
                                     const Template& tmpl, double cosine_threshold);

// --- Kalman filter over [position, velocity] with unit time step ---

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix3x6d = Eigen::Matrix<double, 3, 6>;
using Matrix6x3d = Eigen::Matrix<double, 6, 3>;

struct KalmanNoise {
  Matrix6d process;             // Q
  Eigen::Matrix3d measurement;  // R
  Matrix6d initial_covariance;  // P0, also used on reset

  static KalmanNoise defaults();
};

struct KalmanState {
  Vector6d x_hat = Vector6d::Zero();
  Matrix6d P = Matrix6d::Identity();
  Matrix6d Q = Matrix6d::Zero();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();

  /// H = [I3 | 0].
  static Matrix3x6d observation();
  /// Constant-velocity transition with a one-frame step.
  static Matrix6d transition();
  /// Position z, zero velocity, P = P0.
  static KalmanState initialize(const Point3& z, const KalmanNoise& noise);

  Point3 position() const { return x_hat.head<3>(); }
  Eigen::Vector3d velocity() const { return x_hat.tail<3>(); }
};

KalmanState kalman_predict(const KalmanState& state);

/// Throws kSingularInnovation if H P H^T + R cannot be inverted.
KalmanState kalman_update(const KalmanState& state, const Point3& z);

struct KalmanStep {
  KalmanState state;
  bool did_reset = false;
  double innovation = 0.0;  // ‖z - H·predicted‖
};

/// Predicts one step, then either resets to z (innovation above `reset_threshold`) or updates.
KalmanStep kalman_step_with_reset(const KalmanState& state, const Point3& z,
                                  double reset_threshold, const Matrix6d& initial_covariance);

// --- Per-instance tracking ---

struct TrackerConfig {
  double cosine_threshold = 0.6;
  double reset_threshold = 0.15;
  bool use_kalman = false;
  int depth_window_radius = 2;
  bool visible_only_update = false;
  KalmanNoise kalman = KalmanNoise::defaults();

  void validate() const;
};

struct TrackState {
  std::optional<Point3> memory;
  std::optional<KalmanState> kalman;
  std::optional<FrameIndex> last_update_frame;
};

enum class Provenance { kFreshDetection, kMemoryCarry, kKalmanSmoothed };

struct TrajectoryEntry {
  Point3 position = Point3::Zero();
  Provenance provenance = Provenance::kFreshDetection;
};

struct Trajectory {
  std::map<FrameIndex, TrajectoryEntry> entries;
  std::vector<FrameIndex> reset_frames;

  std::optional<Point3> at(FrameIndex frame) const;
  bool operator==(const Trajectory& other) const;
};

struct FrameObservation {
  FrameIndex frame = 0;
  std::span<const Proposal> proposals;
  const DepthMap* depth = nullptr;  // non-owning; may be null (no depth)
  CameraPose pose;
  /// Ground-truth visibility, consulted only when visible_only_update is set.
  std::optional<bool> visible;
};

/// Streaming form of track_instance: feed frames in increasing order.
class InstanceTracker {
 public:
  InstanceTracker(Template tmpl, CameraIntrinsics intr, TrackerConfig cfg);

  /// Returns the entry emitted for this frame, if any.
  std::optional<TrajectoryEntry> observe(const FrameObservation& obs);

  const TrackState& state() const { return state_; }
  const Trajectory& trajectory() const { return trajectory_; }
  Trajectory take_trajectory() && { return std::move(trajectory_); }

 private:
  std::optional<Point3> detect(const FrameObservation& obs) const;

  Template template_;
  CameraIntrinsics intr_;
  TrackerConfig cfg_;
  TrackState state_;
  Trajectory trajectory_;
  std::optional<FrameIndex> last_frame_;
};

Trajectory track_instance(std::span<const FrameObservation> frames, const Template& tmpl,
                          const CameraIntrinsics& intr, const TrackerConfig& cfg);

}  // namespace egotrack
