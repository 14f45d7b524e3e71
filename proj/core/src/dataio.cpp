#include "egotrack/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <system_error>

#include "egotrack/error.hpp"
#include "text_format.hpp"

namespace egotrack {

namespace fs = std::filesystem;
using text::Reader;

namespace layout {
std::string depth_file(FrameIndex frame) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "depth/%06lld.d3eg", static_cast<long long>(frame));
  return buf;
}
}  // namespace layout

namespace {

constexpr double kQuaternionNormTolerance = 1e-3;
constexpr double kEmbeddingNormMin = 0.99;
constexpr double kEmbeddingNormMax = 1.01;
constexpr double kSvoeMinArea = 500.0;
constexpr std::uint64_t kMaxAnnotationCells = 1ULL << 26;
constexpr FrameIndex kMaxFrames = 10'000'000;

Embedding read_embedding(const Reader& r, std::size_t first, int dim) {
  Embedding e(dim);
  for (int k = 0; k < dim; ++k) e[k] = r.real(first + static_cast<std::size_t>(k));
  const double norm = e.norm();
  if (!(norm >= kEmbeddingNormMin && norm <= kEmbeddingNormMax)) {
    r.fail(ErrorCode::kValidation, "embedding norm " + std::to_string(norm) + " is outside [0.99, 1.01]");
  }
  if (std::abs(norm - 1.0) > 1e-12) e /= norm;
  return e;
}

void append_embedding(std::string& out, const Embedding& e) {
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    out += ' ';
    text::append_real(out, e[k]);
  }
}

BBox read_bbox(const Reader& r, std::size_t first) {
  const BBox b{r.real(first), r.real(first + 1), r.real(first + 2), r.real(first + 3)};
  if (!b.valid()) r.fail(ErrorCode::kValidation, "bounding box needs x_min < x_max and y_min < y_max");
  return b;
}

void append_bbox(std::string& out, const BBox& b) {
  for (double v : {b.x_min, b.y_min, b.x_max, b.y_max}) {
    out += ' ';
    text::append_real(out, v);
  }
}

int read_dim_header(const Reader& r) {
  r.expect_count(2);
  if (r.token(0) != "dim") r.fail(ErrorCode::kParse, "expected 'dim D' header");
  const std::int64_t dim = r.integer(1);
  if (dim < 1 || dim > kMaxEmbeddingDim) r.fail(ErrorCode::kValidation, "embedding dimension out of range");
  return static_cast<int>(dim);
}

FrameIndex read_frame(const Reader& r, std::size_t i) {
  const std::int64_t f = r.integer(i);
  if (f < 0 || f >= kMaxFrames) r.fail(ErrorCode::kValidation, "frame index out of range");
  return f;
}

}  // namespace

// --- manifest / hashing ---

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string Manifest::to_string() const {
  std::string out = "# fnv1a64 size path\n";
  for (const auto& e : entries) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx %llu ", static_cast<unsigned long long>(e.fnv1a),
                  static_cast<unsigned long long>(e.size));
    out += buf;
    out += e.path;
    out += '\n';
  }
  return out;
}

std::uint64_t Manifest::digest() const { return fnv1a64(to_string()); }

// --- intrinsics ---

std::string format_intrinsics(const CameraIntrinsics& intr) {
  std::string out = "# fx fy cx cy width height\n";
  for (double v : {intr.fx, intr.fy, intr.cx, intr.cy}) {
    text::append_real(out, v);
    out += ' ';
  }
  text::append_int(out, intr.width);
  out += ' ';
  text::append_int(out, intr.height);
  out += '\n';
  return out;
}

CameraIntrinsics parse_intrinsics(std::string_view content) {
  const auto lines = text::tokenize(content);
  if (lines.size() != 1) throw Error(ErrorCode::kParse, "intrinsics: expected exactly one record");
  const Reader r(layout::kIntrinsics, lines[0]);
  r.expect_count(6);
  CameraIntrinsics intr{r.real(0), r.real(1), r.real(2), r.real(3), r.small_int(4), r.small_int(5)};
  intr.validate();
  return intr;
}

// --- poses ---

std::string format_poses(std::span<const CameraPose> poses) {
  std::string out = "# frame tx ty tz qx qy qz qw\n";
  for (const auto& p : poses) {
    Eigen::Quaterniond q = p.quaternion().normalized();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    text::append_int(out, p.timestamp);
    for (double v : {p.translation.x(), p.translation.y(), p.translation.z(), q.x(), q.y(), q.z(), q.w()}) {
      out += ' ';
      text::append_real(out, v);
    }
    out += '\n';
  }
  return out;
}

std::vector<CameraPose> parse_poses(std::string_view content) {
  std::vector<CameraPose> poses;
  for (const auto& line : text::tokenize(content)) {
    const Reader r(layout::kPoses, line);
    r.expect_count(8);
    const FrameIndex frame = read_frame(r, 0);
    const Eigen::Vector3d t(r.real(1), r.real(2), r.real(3));
    const Eigen::Quaterniond q(r.real(7), r.real(4), r.real(5), r.real(6));
    const double norm = q.norm();
    if (std::abs(norm - 1.0) > kQuaternionNormTolerance) {
      r.fail(ErrorCode::kValidation, "quaternion norm " + std::to_string(norm) + " is not unit");
    }
    poses.push_back(CameraPose::from_quaternion(q, t, frame));
  }
  return poses;
}

// --- depth ---

std::vector<std::byte> encode_depth(const DepthMap& map) {
  std::vector<std::byte> out;
  out.reserve(12 + 4 * map.values().size());
  auto put_u32 = [&](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::byte>((v >> (8 * k)) & 0xffu));
  };
  for (char c : {'D', '3', 'E', 'G'}) out.push_back(static_cast<std::byte>(c));
  put_u32(static_cast<std::uint32_t>(map.width()));
  put_u32(static_cast<std::uint32_t>(map.height()));
  for (float v : map.values()) put_u32(std::bit_cast<std::uint32_t>(v));
  return out;
}

DepthMap decode_depth(std::span<const std::byte> bytes) {
  if (bytes.size() < 12) throw Error(ErrorCode::kFormat, "depth: truncated header");
  if (std::memcmp(bytes.data(), "D3EG", 4) != 0) throw Error(ErrorCode::kFormat, "depth: bad magic");
  auto get_u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[at + static_cast<std::size_t>(k)]) << (8 * k);
    return v;
  };
  const std::uint64_t w = get_u32(4);
  const std::uint64_t h = get_u32(8);
  if (w > 0x7fffffffULL || h > 0x7fffffffULL) throw Error(ErrorCode::kFormat, "depth: dimensions too large");
  const std::uint64_t pixels = w * h;
  if (pixels > kMaxDepthPixels) throw Error(ErrorCode::kSizeLimit, "depth: map exceeds the pixel limit");
  const std::uint64_t expected = 12 + 4 * pixels;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kFormat, "depth: truncated payload (" + std::to_string(bytes.size()) +
                                        " bytes, header implies " + std::to_string(expected) + ")");
  }
  if (bytes.size() > expected) throw Error(ErrorCode::kFormat, "depth: trailing bytes after payload");
  std::vector<float> values(static_cast<std::size_t>(pixels));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<float>(get_u32(12 + 4 * i));
  return DepthMap(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

// --- proposals ---

std::span<const Proposal> ProposalSet::at(FrameIndex frame) const {
  const auto it = frames.find(frame);
  if (it == frames.end()) return {};
  return it->second;
}

std::string format_proposals(const ProposalSet& set) {
  std::string out = "# frame x_min y_min x_max y_max score embedding...\ndim ";
  text::append_int(out, set.dim);
  out += '\n';
  for (const auto& [frame, list] : set.frames) {
    for (const auto& p : list) {
      text::append_int(out, frame);
      append_bbox(out, p.bbox);
      out += ' ';
      text::append_real(out, p.score);
      append_embedding(out, p.embedding);
      out += '\n';
    }
  }
  return out;
}

ProposalSet parse_proposals(std::string_view content) {
  const auto lines = text::tokenize(content);
  if (lines.empty()) throw Error(ErrorCode::kParse, "proposals: missing 'dim D' header");
  ProposalSet set;
  set.dim = read_dim_header(Reader(layout::kProposals, lines[0]));
  const std::size_t fields = 6 + static_cast<std::size_t>(set.dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Reader r(layout::kProposals, lines[i]);
    if (r.size() != fields) {
      r.fail(ErrorCode::kDimensionMismatch, "expected " + std::to_string(fields) + " fields for dim " +
                                                std::to_string(set.dim) + ", found " + std::to_string(r.size()));
    }
    Proposal p;
    const FrameIndex frame = read_frame(r, 0);
    p.bbox = read_bbox(r, 1);
    p.score = r.real(5);
    if (p.score < 0.0 || p.score > 1.0) r.fail(ErrorCode::kValidation, "score outside [0, 1]");
    p.embedding = read_embedding(r, 6, set.dim);
    set.frames[frame].push_back(std::move(p));
  }
  return set;
}

// --- annotations ---

namespace {

template <typename T, typename Emit>
void run_length(const std::map<FrameIndex, T>& values, Emit emit) {
  auto it = values.begin();
  while (it != values.end()) {
    const FrameIndex start = it->first;
    FrameIndex end = start;
    const T v = it->second;
    auto next = std::next(it);
    while (next != values.end() && next->first == end + 1 && next->second == v) {
      end = next->first;
      ++next;
    }
    emit(start, end, v);
    it = next;
  }
}

}  // namespace

std::string format_annotations(std::span<const GroundTruthInstance> instances, FrameIndex frame_count) {
  std::string out = "# egotrack annotations\nframes ";
  text::append_int(out, frame_count);
  out += '\n';
  for (const auto& inst : instances) {
    out += "instance ";
    text::append_int(out, inst.id);
    out += '\n';
    for (const auto& s : inst.stationary_intervals) {
      out += "interval ";
      text::append_int(out, s.start);
      out += ' ';
      text::append_int(out, s.end);
      for (double v : {s.center.x(), s.center.y(), s.center.z()}) {
        out += ' ';
        text::append_real(out, v);
      }
      out += '\n';
    }
    std::map<FrameIndex, MotionState> motion;
    for (std::size_t f = 0; f < inst.motion.size(); ++f) motion.emplace(static_cast<FrameIndex>(f), inst.motion[f]);
    run_length(motion, [&](FrameIndex s, FrameIndex e, MotionState m) {
      out += "motion ";
      text::append_int(out, s);
      out += ' ';
      text::append_int(out, e);
      out += m == MotionState::kStationary ? " stationary\n" : " dynamic\n";
    });
    run_length(inst.visibility, [&](FrameIndex s, FrameIndex e, bool v) {
      out += "visible ";
      text::append_int(out, s);
      out += ' ';
      text::append_int(out, e);
      out += v ? " 1\n" : " 0\n";
    });
    for (const auto& [frame, box] : inst.boxes_2d) {
      out += "box ";
      text::append_int(out, frame);
      append_bbox(out, box);
      out += '\n';
    }
    out += "end\n";
  }
  return out;
}

std::vector<GroundTruthInstance> parse_annotations(std::string_view content) {
  const auto lines = text::tokenize(content);
  std::vector<GroundTruthInstance> instances;
  FrameIndex frame_count = -1;
  GroundTruthInstance* current = nullptr;
  std::vector<bool> motion_set;
  std::set<InstanceId> seen;

  auto finish = [&](const Reader& r) {
    // Frames without an explicit motion record are stationary inside intervals, dynamic elsewhere.
    for (const auto& s : current->stationary_intervals) {
      for (FrameIndex f = s.start; f <= s.end; ++f) {
        if (!motion_set[static_cast<std::size_t>(f)]) current->motion[static_cast<std::size_t>(f)] = MotionState::kStationary;
      }
    }
    try {
      current->validate();
    } catch (const Error& e) {
      r.fail(e.code(), e.detail());
    }
    current = nullptr;
  };

  for (const auto& line : lines) {
    const Reader r(layout::kAnnotations, line);
    const std::string_view kind = r.token(0);
    if (kind == "frames") {
      r.expect_count(2);
      if (frame_count >= 0) r.fail(ErrorCode::kParse, "duplicate 'frames' record");
      frame_count = r.integer(1);
      if (frame_count < 0 || frame_count > kMaxFrames) r.fail(ErrorCode::kValidation, "frame count out of range");
      continue;
    }
    if (frame_count < 0) r.fail(ErrorCode::kParse, "'frames N' must precede instance records");
    auto in_range = [&](std::size_t i) {
      const FrameIndex f = r.integer(i);
      if (f < 0 || f >= frame_count) r.fail(ErrorCode::kValidation, "frame " + std::to_string(f) + " outside [0, frames)");
      return f;
    };

    if (kind == "instance") {
      r.expect_count(2);
      if (current != nullptr) r.fail(ErrorCode::kParse, "'instance' inside an unterminated block");
      const InstanceId id = r.small_int(1);
      if (!seen.insert(id).second) r.fail(ErrorCode::kValidation, "duplicate instance id " + std::to_string(id));
      if (static_cast<std::uint64_t>(frame_count) * seen.size() > kMaxAnnotationCells) {
        r.fail(ErrorCode::kSizeLimit, "annotation too large");
      }
      instances.emplace_back();
      current = &instances.back();
      current->id = id;
      current->motion.assign(static_cast<std::size_t>(frame_count), MotionState::kDynamic);
      motion_set.assign(static_cast<std::size_t>(frame_count), false);
      continue;
    }
    if (current == nullptr) r.fail(ErrorCode::kParse, "record outside an instance block");

    if (kind == "end") {
      r.expect_count(1);
      finish(r);
    } else if (kind == "interval") {
      r.expect_count(6);
      StationaryInterval s{in_range(1), in_range(2), Point3(r.real(3), r.real(4), r.real(5))};
      if (s.end < s.start) r.fail(ErrorCode::kValidation, "interval end precedes start");
      current->stationary_intervals.push_back(s);
    } else if (kind == "motion") {
      r.expect_count(4);
      const FrameIndex s = in_range(1);
      const FrameIndex e = in_range(2);
      if (e < s) r.fail(ErrorCode::kValidation, "motion run end precedes start");
      MotionState m;
      if (r.token(3) == "stationary") {
        m = MotionState::kStationary;
      } else if (r.token(3) == "dynamic") {
        m = MotionState::kDynamic;
      } else {
        r.fail(ErrorCode::kParse, "motion state must be 'stationary' or 'dynamic'");
      }
      for (FrameIndex f = s; f <= e; ++f) {
        current->motion[static_cast<std::size_t>(f)] = m;
        motion_set[static_cast<std::size_t>(f)] = true;
      }
    } else if (kind == "visible") {
      r.expect_count(4);
      const FrameIndex s = in_range(1);
      const FrameIndex e = in_range(2);
      if (e < s) r.fail(ErrorCode::kValidation, "visibility run end precedes start");
      const std::int64_t v = r.integer(3);
      if (v != 0 && v != 1) r.fail(ErrorCode::kParse, "visibility flag must be 0 or 1");
      for (FrameIndex f = s; f <= e; ++f) current->visibility[f] = (v == 1);
    } else if (kind == "box") {
      r.expect_count(6);
      const FrameIndex f = in_range(1);
      if (!current->boxes_2d.emplace(f, read_bbox(r, 2)).second) r.fail(ErrorCode::kValidation, "duplicate box for frame");
    } else {
      r.fail(ErrorCode::kParse, "unknown record '" + std::string(kind.substr(0, 32)) + "'");
    }
  }
  if (current != nullptr) throw Error(ErrorCode::kParse, "annotations: unterminated instance block");
  return instances;
}

// --- enrollment ---

const SvoeRecord* Enrollment::svoe_for(InstanceId id) const {
  for (const auto& r : svoe) {
    if (r.instance_id == id) return &r;
  }
  return nullptr;
}

const MvpeRecord* Enrollment::mvpe_for(InstanceId id) const {
  for (const auto& r : mvpe) {
    if (r.instance_id == id) return &r;
  }
  return nullptr;
}

std::string format_svoe(std::span<const SvoeRecord> records) {
  std::string out = "# svoe instance frame x_min y_min x_max y_max\n";
  for (const auto& rec : records) {
    out += "svoe ";
    text::append_int(out, rec.instance_id);
    out += ' ';
    text::append_int(out, rec.frame);
    append_bbox(out, rec.bbox);
    out += '\n';
  }
  return out;
}

std::vector<SvoeRecord> parse_svoe(std::string_view content, Warnings* warnings) {
  std::vector<SvoeRecord> records;
  std::set<InstanceId> seen;
  for (const auto& line : text::tokenize(content)) {
    const Reader r(layout::kSvoe, line);
    r.expect_count(7);
    if (r.token(0) != "svoe") r.fail(ErrorCode::kParse, "expected an 'svoe' record");
    SvoeRecord rec{r.small_int(1), read_frame(r, 2), read_bbox(r, 3)};
    if (!seen.insert(rec.instance_id).second) r.fail(ErrorCode::kValidation, "duplicate SVOE instance");
    if (rec.bbox.area() < kSvoeMinArea && warnings != nullptr) {
      warnings->push_back(std::string(layout::kSvoe) + ":" + std::to_string(line.number) + ": instance " +
                          std::to_string(rec.instance_id) + " enrollment box area " +
                          std::to_string(rec.bbox.area()) + " px^2 is below 500");
    }
    records.push_back(rec);
  }
  return records;
}

std::string format_mvpe(std::span<const MvpeRecord> records, int dim) {
  std::string out = "# view instance embedding... | image instance path\ndim ";
  text::append_int(out, dim);
  out += '\n';
  for (const auto& rec : records) {
    for (const auto& v : rec.views) {
      out += "view ";
      text::append_int(out, rec.instance_id);
      append_embedding(out, v);
      out += '\n';
    }
    for (const auto& path : rec.image_paths) {
      out += "image ";
      text::append_int(out, rec.instance_id);
      out += ' ';
      out += path;
      out += '\n';
    }
  }
  return out;
}

std::vector<MvpeRecord> parse_mvpe(std::string_view content, int* dim_out) {
  const auto lines = text::tokenize(content);
  if (lines.empty()) throw Error(ErrorCode::kParse, "mvpe: missing 'dim D' header");
  const int dim = read_dim_header(Reader(layout::kMvpe, lines[0]));
  if (dim_out != nullptr) *dim_out = dim;
  std::vector<MvpeRecord> records;
  auto record_for = [&](InstanceId id) -> MvpeRecord& {
    for (auto& rec : records) {
      if (rec.instance_id == id) return rec;
    }
    records.push_back(MvpeRecord{id, {}, {}});
    return records.back();
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Reader r(layout::kMvpe, lines[i]);
    const std::string_view kind = r.token(0);
    if (kind == "view") {
      if (r.size() != 2 + static_cast<std::size_t>(dim)) {
        r.fail(ErrorCode::kDimensionMismatch, "view record does not match dim " + std::to_string(dim));
      }
      const InstanceId id = r.small_int(1);
      record_for(id).views.push_back(read_embedding(r, 2, dim));
    } else if (kind == "image") {
      r.expect_count(3);
      record_for(r.small_int(1)).image_paths.emplace_back(r.token(2));
    } else {
      r.fail(ErrorCode::kParse, "expected 'view' or 'image' record");
    }
  }
  return records;
}

// --- trajectories ---

namespace {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kFreshDetection: return "fresh";
    case Provenance::kMemoryCarry: return "memory";
    case Provenance::kKalmanSmoothed: return "kalman";
  }
  return "fresh";
}

}  // namespace

std::string format_trajectories(const TrajectorySet& set) {
  std::string out = "# instance frame x y z provenance | reset instance frame\n";
  for (const auto& [id, traj] : set) {
    for (const auto& [frame, e] : traj.entries) {
      text::append_int(out, id);
      out += ' ';
      text::append_int(out, frame);
      for (double v : {e.position.x(), e.position.y(), e.position.z()}) {
        out += ' ';
        text::append_real(out, v);
      }
      out += ' ';
      out += provenance_name(e.provenance);
      out += '\n';
    }
    for (FrameIndex f : traj.reset_frames) {
      out += "reset ";
      text::append_int(out, id);
      out += ' ';
      text::append_int(out, f);
      out += '\n';
    }
  }
  return out;
}

TrajectorySet parse_trajectories(std::string_view content) {
  TrajectorySet set;
  for (const auto& line : text::tokenize(content)) {
    const Reader r("trajectories", line);
    if (r.token(0) == "reset") {
      r.expect_count(3);
      set[r.small_int(1)].reset_frames.push_back(read_frame(r, 2));
      continue;
    }
    r.expect_count(6);
    const InstanceId id = r.small_int(0);
    const FrameIndex frame = read_frame(r, 1);
    TrajectoryEntry e;
    e.position = Point3(r.real(2), r.real(3), r.real(4));
    const std::string_view prov = r.token(5);
    if (prov == "fresh") {
      e.provenance = Provenance::kFreshDetection;
    } else if (prov == "memory") {
      e.provenance = Provenance::kMemoryCarry;
    } else if (prov == "kalman") {
      e.provenance = Provenance::kKalmanSmoothed;
    } else {
      r.fail(ErrorCode::kParse, "provenance must be fresh, memory or kalman");
    }
    if (!set[id].entries.emplace(frame, e).second) r.fail(ErrorCode::kValidation, "duplicate frame for instance");
  }
  for (auto& [id, traj] : set) std::sort(traj.reset_frames.begin(), traj.reset_frames.end());
  return set;
}

// --- files ---

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed for " + path.string());
  return content;
}

std::vector<std::byte> read_binary_file(const fs::path& path) {
  const std::string content = read_text_file(path);
  std::vector<std::byte> bytes(content.size());
  if (!content.empty()) std::memcpy(bytes.data(), content.data(), content.size());
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::byte> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move " + tmp.string() + " into place");
  }
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  write_file_atomic(path, std::as_bytes(std::span<const char>(content.data(), content.size())));
}

namespace {

template <typename Fn>
auto with_path(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace

std::vector<CameraPose> read_poses(const fs::path& path) {
  const std::string content = read_text_file(path);
  return with_path(path, [&] { return parse_poses(content); });
}

void write_poses(const fs::path& path, std::span<const CameraPose> poses) {
  write_file_atomic(path, format_poses(poses));
}

DepthMap read_depth(const fs::path& path) {
  const auto bytes = read_binary_file(path);
  return with_path(path, [&] { return decode_depth(bytes); });
}

void write_depth(const fs::path& path, const DepthMap& map) { write_file_atomic(path, encode_depth(map)); }

ProposalSet read_proposals(const fs::path& path) {
  const std::string content = read_text_file(path);
  return with_path(path, [&] { return parse_proposals(content); });
}

void write_proposals(const fs::path& path, const ProposalSet& set) {
  write_file_atomic(path, format_proposals(set));
}

std::vector<GroundTruthInstance> read_annotations(const fs::path& path) {
  const std::string content = read_text_file(path);
  return with_path(path, [&] { return parse_annotations(content); });
}

Enrollment read_enrollment(const fs::path& dir, Warnings* warnings) {
  Enrollment e;
  const fs::path svoe = dir / layout::kSvoe;
  const fs::path mvpe = dir / layout::kMvpe;
  if (fs::exists(svoe)) {
    const std::string content = read_text_file(svoe);
    e.svoe = with_path(svoe, [&] { return parse_svoe(content, warnings); });
  }
  if (fs::exists(mvpe)) {
    const std::string content = read_text_file(mvpe);
    e.mvpe = with_path(mvpe, [&] { return parse_mvpe(content, &e.mvpe_dim); });
  }
  return e;
}

TrajectorySet read_trajectories(const fs::path& path) {
  const std::string content = read_text_file(path);
  return with_path(path, [&] { return parse_trajectories(content); });
}

void write_trajectories(const fs::path& path, const TrajectorySet& set) {
  write_file_atomic(path, format_trajectories(set));
}

Dataset read_dataset(const fs::path& dir, Warnings* warnings) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "dataset directory not found: " + dir.string());
  Dataset ds;
  {
    const fs::path p = dir / layout::kIntrinsics;
    const std::string content = read_text_file(p);
    ds.intrinsics = with_path(p, [&] { return parse_intrinsics(content); });
  }
  ds.poses = read_poses(dir / layout::kPoses);
  for (std::size_t i = 0; i < ds.poses.size(); ++i) {
    if (ds.poses[i].timestamp != static_cast<FrameIndex>(i)) {
      throw Error(ErrorCode::kValidation, (dir / layout::kPoses).string() +
                                              ": frame indices must be contiguous from 0 (entry " +
                                              std::to_string(i) + " has frame " +
                                              std::to_string(ds.poses[i].timestamp) + ")");
    }
  }
  ds.depth.reserve(ds.poses.size());
  for (std::size_t i = 0; i < ds.poses.size(); ++i) {
    const fs::path p = dir / layout::depth_file(static_cast<FrameIndex>(i));
    if (!fs::exists(p)) throw Error(ErrorCode::kIo, "missing depth file " + p.string());
    ds.depth.push_back(read_depth(p));
    if (ds.depth.back().width() != ds.intrinsics.width || ds.depth.back().height() != ds.intrinsics.height) {
      throw Error(ErrorCode::kValidation, p.string() + ": depth size differs from the intrinsics image size");
    }
  }
  ds.proposals = read_proposals(dir / layout::kProposals);
  if (!ds.proposals.frames.empty() && ds.proposals.frames.rbegin()->first >= ds.frame_count()) {
    throw Error(ErrorCode::kFrameMismatch, (dir / layout::kProposals).string() +
                                               ": proposals reference frames beyond the pose list");
  }
  ds.annotations = read_annotations(dir / layout::kAnnotations);
  for (const auto& inst : ds.annotations) {
    if (inst.motion.size() != ds.poses.size()) {
      throw Error(ErrorCode::kFrameMismatch, (dir / layout::kAnnotations).string() +
                                                 ": annotation frame count differs from the pose list");
    }
    with_path(dir / layout::kAnnotations, [&] {
      inst.validate(&ds.intrinsics);
      return 0;
    });
  }
  ds.enrollment = read_enrollment(dir, warnings);
  for (const auto& rec : ds.enrollment.svoe) {
    if (rec.frame >= ds.frame_count()) {
      throw Error(ErrorCode::kFrameMismatch, "SVOE enrollment references frame " + std::to_string(rec.frame));
    }
  }
  return ds;
}

Manifest build_manifest(const fs::path& dir) {
  Manifest m;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == layout::kManifest) continue;
    const auto bytes = read_binary_file(entry.path());
    m.entries.push_back({rel, bytes.size(), fnv1a64(bytes)});
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return m;
}

Manifest write_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / layout::kDepthDir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / layout::kDepthDir).string() + ": " + ec.message());
  write_file_atomic(dir / layout::kIntrinsics, format_intrinsics(ds.intrinsics));
  write_poses(dir / layout::kPoses, ds.poses);
  for (std::size_t i = 0; i < ds.depth.size(); ++i) {
    write_depth(dir / layout::depth_file(static_cast<FrameIndex>(i)), ds.depth[i]);
  }
  write_proposals(dir / layout::kProposals, ds.proposals);
  write_file_atomic(dir / layout::kAnnotations, format_annotations(ds.annotations, ds.frame_count()));
  write_file_atomic(dir / layout::kSvoe, format_svoe(ds.enrollment.svoe));
  write_file_atomic(dir / layout::kMvpe, format_mvpe(ds.enrollment.mvpe, ds.enrollment.mvpe_dim));
  Manifest m = build_manifest(dir);
  write_file_atomic(dir / layout::kManifest, m.to_string());
  return m;
}

}  // namespace egotrack
