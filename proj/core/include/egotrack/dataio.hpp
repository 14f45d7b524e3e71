#pragma once

// On-disk formats. Text formats are ASCII, whitespace separated, with `#` comments.
// Binary values are little-endian.
//
// Dataset layout (root directory):
//   intrinsics.txt        fx fy cx cy width height
//   poses.txt             frame tx ty tz qx qy qz qw      (world-from-camera)
//   depth/NNNNNN.d3eg     "D3EG" u32 width u32 height, width*height f32 meters, NaN = missing
//   proposals.txt         "dim D", then: frame x_min y_min x_max y_max score e_1 .. e_D
//   annotations.txt       instance blocks (see format_annotations)
//   enrollment_svoe.txt   svoe id frame x_min y_min x_max y_max
//   enrollment_mvpe.txt   "dim D", then: view id e_1 .. e_D | image id path
//   manifest.txt          fnv1a64 size path, one line per file above

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egotrack/evaluation.hpp"
#include "egotrack/geometry.hpp"
#include "egotrack/tracking.hpp"

namespace egotrack {

namespace layout {
inline constexpr std::string_view kIntrinsics = "intrinsics.txt";
inline constexpr std::string_view kPoses = "poses.txt";
inline constexpr std::string_view kDepthDir = "depth";
inline constexpr std::string_view kProposals = "proposals.txt";
inline constexpr std::string_view kAnnotations = "annotations.txt";
inline constexpr std::string_view kSvoe = "enrollment_svoe.txt";
inline constexpr std::string_view kMvpe = "enrollment_mvpe.txt";
inline constexpr std::string_view kManifest = "manifest.txt";

/// depth/000042.d3eg
std::string depth_file(FrameIndex frame);
}  // namespace layout

/// Readers accept at most this embedding dimension.
inline constexpr int kMaxEmbeddingDim = 4096;
/// Readers reject depth maps with more pixels than this.
inline constexpr std::uint64_t kMaxDepthPixels = 1ULL << 26;

using Warnings = std::vector<std::string>;

struct ProposalSet {
  int dim = 0;
  /// Frames in ascending order; proposals keep file order within a frame.
  std::map<FrameIndex, std::vector<Proposal>> frames;

  std::span<const Proposal> at(FrameIndex frame) const;
};

struct SvoeRecord {
  InstanceId instance_id = 0;
  FrameIndex frame = 0;
  BBox bbox;
};

struct MvpeRecord {
  InstanceId instance_id = 0;
  std::vector<Embedding> views;
  std::vector<std::string> image_paths;
};

struct Enrollment {
  std::vector<SvoeRecord> svoe;
  int mvpe_dim = 0;
  std::vector<MvpeRecord> mvpe;

  const SvoeRecord* svoe_for(InstanceId id) const;
  const MvpeRecord* mvpe_for(InstanceId id) const;
};

struct Dataset {
  CameraIntrinsics intrinsics;
  std::vector<CameraPose> poses;
  std::vector<DepthMap> depth;
  ProposalSet proposals;
  std::vector<GroundTruthInstance> annotations;
  Enrollment enrollment;

  FrameIndex frame_count() const { return static_cast<FrameIndex>(poses.size()); }
};

struct ManifestEntry {
  std::string path;
  std::uint64_t size = 0;
  std::uint64_t fnv1a = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::string to_string() const;
  /// FNV-1a of to_string().
  std::uint64_t digest() const;
};

std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::uint64_t fnv1a64(std::string_view text);

// --- text/binary codecs; parse_* throw Error(kParse | kValidation | kFormat) ---

std::string format_intrinsics(const CameraIntrinsics& intr);
CameraIntrinsics parse_intrinsics(std::string_view text);

/// Quaternions are normalized on write; the reader rejects |‖q‖ - 1| > 1e-3.
std::string format_poses(std::span<const CameraPose> poses);
std::vector<CameraPose> parse_poses(std::string_view text);

std::vector<std::byte> encode_depth(const DepthMap& map);
DepthMap decode_depth(std::span<const std::byte> bytes);

std::string format_proposals(const ProposalSet& set);
/// Embeddings with norm in [0.99, 1.01] are renormalized; others are rejected.
ProposalSet parse_proposals(std::string_view text);

/// `frame_count` is written as the sequence length that motion states cover.
std::string format_annotations(std::span<const GroundTruthInstance> instances, FrameIndex frame_count);
std::vector<GroundTruthInstance> parse_annotations(std::string_view text);

std::string format_svoe(std::span<const SvoeRecord> records);
/// Boxes under 500 px² produce a warning, not an error.
std::vector<SvoeRecord> parse_svoe(std::string_view text, Warnings* warnings = nullptr);

std::string format_mvpe(std::span<const MvpeRecord> records, int dim);
std::vector<MvpeRecord> parse_mvpe(std::string_view text, int* dim = nullptr);

std::string format_trajectories(const TrajectorySet& set);
TrajectorySet parse_trajectories(std::string_view text);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(std::string_view text);

// --- files ---

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

std::vector<CameraPose> read_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& path, std::span<const CameraPose> poses);
DepthMap read_depth(const std::filesystem::path& path);
void write_depth(const std::filesystem::path& path, const DepthMap& map);
ProposalSet read_proposals(const std::filesystem::path& path);
void write_proposals(const std::filesystem::path& path, const ProposalSet& set);
std::vector<GroundTruthInstance> read_annotations(const std::filesystem::path& path);
Enrollment read_enrollment(const std::filesystem::path& dataset_dir, Warnings* warnings = nullptr);
TrajectorySet read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const TrajectorySet& set);

/// Loads and cross-validates a dataset directory (contiguous frames, one depth file per pose,
/// annotation boxes inside the image, proposals within the frame range).
Dataset read_dataset(const std::filesystem::path& dir, Warnings* warnings = nullptr);
Manifest write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Manifest build_manifest(const std::filesystem::path& dir);

}  // namespace egotrack
