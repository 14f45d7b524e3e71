#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>

#include "egotrack/dataio.hpp"
#include "egotrack/evaluation.hpp"
#include "egotrack/geometry.hpp"
#include "egotrack/tracking.hpp"

namespace egotrack {

struct Placement {
  FrameIndex start = 0;  // inclusive
  FrameIndex end = 0;    // inclusive
  Point3 position = Point3::Zero();
};

struct InstanceSpec {
  InstanceId id = 0;
  /// Drawn from the scene seed when empty.
  Embedding embedding;
  double radius = 0.05;
  /// Ordered, disjoint. Gaps between placements are linear "dynamic" motion; before the first
  /// and after the last placement the instance is absent from the scene.
  std::vector<Placement> schedule;
};

struct CameraWaypoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d look_at = Eigen::Vector3d::UnitX();
};

/// Scene description for the synthetic egocentric generator. World frame is z-up.
struct SceneSpec {
  std::uint64_t seed = 0;
  FrameIndex frame_count = 300;
  CameraIntrinsics intrinsics{200.0, 200.0, 80.0, 60.0, 160, 120};
  Eigen::AlignedBox3d room{Eigen::Vector3d(-3.0, -3.0, 0.0), Eigen::Vector3d(3.0, 3.0, 2.5)};
  int embedding_dim = 32;
  std::vector<InstanceSpec> instances;

  /// Random-embedding clutter proposals per frame.
  int distractors_per_frame = 3;
  /// Clutter proposals whose embedding resembles one instance, cosine drawn from the range.
  int lookalikes_per_frame = 0;
  double lookalike_similarity_min = 0.6;
  double lookalike_similarity_max = 0.85;
  /// Place look-alikes only where the noiseless depth exceeds depth_range (far background).
  bool lookalike_background_only = false;

  /// Per-dimension Gaussian noise added to proposal embeddings before renormalizing.
  double embedding_noise = 0.0;
  double depth_noise = 0.0;
  double depth_dropout = 0.0;
  /// Sensor range; farther surfaces read as missing.
  double depth_range = kMaxValidDepth;
  bool occlusion = false;

  /// Camera path, traversed uniformly over the sequence. Empty: static camera at the room
  /// center, 1.5 m up, facing +x.
  std::vector<CameraWaypoint> waypoints;
  /// Per-frame yaw/pitch jitter (radians, standard deviation).
  double angular_jitter = 0.0;

  /// Enrollment generation.
  double svoe_min_area = 500.0;
  int mvpe_views = 5;
  double mvpe_view_noise = 0.0;
  /// 2D boxes are annotated every `box_stride` frames.
  int box_stride = 5;

  /// Throws Error(kValidation) with a field path on the first violated constraint.
  void validate() const;
};

struct ProposalOrigin {
  enum class Kind { kInlier, kDistractor, kLookalike };
  Kind kind = Kind::kDistractor;
  InstanceId instance = -1;  // the instance an inlier or lookalike derives from
};

struct InstanceTruth {
  InstanceId id = 0;
  bool present = false;
  bool visible = false;
  std::optional<BBox> bbox;
  Point3 center = Point3::Zero();
  MotionState motion = MotionState::kDynamic;
};

struct FrameBundle {
  FrameIndex frame = 0;
  CameraPose pose;
  DepthMap depth;
  std::vector<Proposal> proposals;
  std::vector<ProposalOrigin> origins;  // parallel to proposals
  std::vector<InstanceTruth> truth;     // parallel to spec.instances

  const InstanceTruth* truth_for(InstanceId id) const;
};

/// Instance embeddings after filling in seeded defaults.
std::vector<Embedding> resolve_embeddings(const SceneSpec& spec);

CameraPose camera_pose_at(const SceneSpec& spec, FrameIndex frame);

/// Deterministic in spec.seed; `threads` > 1 generates frames in parallel with identical output.
std::vector<FrameBundle> generate_scene(const SceneSpec& spec, unsigned threads = 1);

/// Annotations derived from the generated frames.
std::vector<GroundTruthInstance> build_annotations(const SceneSpec& spec, std::span<const FrameBundle> frames);

/// SVOE: first frame where the instance's box is fully inside the image with area >= svoe_min_area,
/// else the first frame where it is fully inside.
/// MVPE: `mvpe_views` noisy copies of the true embedding.
Enrollment build_enrollment(const SceneSpec& spec, std::span<const FrameBundle> frames);

Dataset to_dataset(const SceneSpec& spec, std::span<const FrameBundle> frames);

/// Writes the dataset layout plus manifest; returns the manifest.
Manifest export_dataset(std::span<const FrameBundle> frames, const SceneSpec& spec,
                        const std::filesystem::path& out_dir);

/// Scene spec files are JSON objects whose keys mirror SceneSpec fields. An optional "preset"
/// key ("standard", "perfect_information", "relocation", "distractor_heavy") selects the base
/// spec that the remaining keys override. Errors carry the offending field path.
SceneSpec scene_spec_from_json(std::string_view json);
std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec read_scene_spec(const std::filesystem::path& path);

/// Ready-made scenes.
namespace presets {

/// Two instances with one relocation each, walking camera, mild noise.
SceneSpec standard(std::uint64_t seed);
/// Noise-free single-instance scene that stays in view for the whole run.
SceneSpec perfect_information(std::uint64_t seed);
/// Scripted instantaneous relocations of at least 0.5 m with depth noise.
SceneSpec relocation(std::uint64_t seed, double depth_noise);
/// Look-alike clutter and a limited-range depth sensor.
SceneSpec distractor_heavy(std::uint64_t seed);

}  // namespace presets

}  // namespace egotrack
