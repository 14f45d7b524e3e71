#include "egotrack/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <thread>

#include "egotrack/error.hpp"
#include "egotrack/random.hpp"

namespace egotrack {

namespace {

// Stream tags for derive_seed; frame streams use the frame index itself.
constexpr std::uint64_t kEmbeddingStream = 1ULL << 62;
constexpr std::uint64_t kMvpeStream = 1ULL << 61;
constexpr std::uint64_t kJitterStream = 1ULL << 60;
constexpr std::uint64_t kDepthPurpose = 1;
constexpr std::uint64_t kProposalPurpose = 2;

constexpr FrameIndex kMaxSceneFrames = 1'000'000;
constexpr int kMaxClutter = 1000;
constexpr double kMinVisibleDepth = 0.1;
constexpr int kBackgroundPlacementTries = 20;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kValidation, path + ": " + msg);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

Embedding random_unit(Rng& rng, int dim) {
  Embedding e(dim);
  do {
    for (int k = 0; k < dim; ++k) e[k] = rng.normal();
  } while (e.norm() < 1e-12);
  return e.normalized();
}

Embedding perturb(const Embedding& e, double sigma, Rng& rng) {
  if (sigma == 0.0) return e;
  Embedding out = e;
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += sigma * rng.normal();
  const double n = out.norm();
  return n > 1e-12 ? Embedding(out / n) : e;
}

/// Unit vector with cosine `a` to unit `e`.
Embedding with_similarity(const Embedding& e, double a, Rng& rng) {
  Embedding u = random_unit(rng, static_cast<int>(e.size()));
  u -= u.dot(e) * e;
  if (u.norm() < 1e-9) return e;
  u.normalize();
  return a * e + std::sqrt(std::max(0.0, 1.0 - a * a)) * u;
}

Eigen::Vector3d catmull_rom(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& p2,
                            const Eigen::Vector3d& p3, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

struct InstanceState {
  bool present = false;
  Point3 center = Point3::Zero();
  MotionState motion = MotionState::kDynamic;
};

InstanceState instance_state(const InstanceSpec& inst, FrameIndex frame) {
  const auto& sched = inst.schedule;
  for (std::size_t k = 0; k < sched.size(); ++k) {
    if (frame < sched[k].start) {
      if (k == 0) return {};
      // Carried between placements.
      const auto& a = sched[k - 1];
      const auto& b = sched[k];
      const double alpha = static_cast<double>(frame - a.end) / static_cast<double>(b.start - a.end);
      return {true, a.position + alpha * (b.position - a.position), MotionState::kDynamic};
    }
    if (frame <= sched[k].end) return {true, sched[k].position, MotionState::kStationary};
  }
  return {};
}

/// Distance along a camera ray (z-normalized direction, so the result is z-depth) to the room exit.
double room_exit(const Eigen::AlignedBox3d& room, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) {
  double t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 1e-12) {
      t = std::min(t, (room.max()[a] - origin[a]) / dir[a]);
    } else if (dir[a] < -1e-12) {
      t = std::min(t, (room.min()[a] - origin[a]) / dir[a]);
    }
  }
  return t;
}

/// Nearest positive ray parameter hitting the sphere, or +inf.
double ray_sphere(const Eigen::Vector3d& dir, const Eigen::Vector3d& center, double radius) {
  const double a = dir.squaredNorm();
  const double b = -2.0 * dir.dot(center);
  const double c = center.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double sq = std::sqrt(disc);
  const double t0 = (-b - sq) / (2.0 * a);
  if (t0 > 0.0) return t0;
  const double t1 = (-b + sq) / (2.0 * a);
  return t1 > 0.0 ? t1 : std::numeric_limits<double>::infinity();
}

BBox random_box(Rng& rng, const CameraIntrinsics& intr) {
  const double w_max = std::min(60.0, static_cast<double>(intr.width));
  const double h_max = std::min(60.0, static_cast<double>(intr.height));
  const double w = rng.uniform(std::min(10.0, w_max * 0.5), w_max);
  const double h = rng.uniform(std::min(10.0, h_max * 0.5), h_max);
  const double x0 = rng.uniform(0.0, intr.width - w);
  const double y0 = rng.uniform(0.0, intr.height - h);
  return {x0, y0, x0 + w, y0 + h};
}

struct SceneContext {
  const SceneSpec& spec;
  std::vector<Embedding> embeddings;
};

FrameBundle generate_frame(const SceneContext& ctx, FrameIndex frame) {
  const SceneSpec& spec = ctx.spec;
  const CameraIntrinsics& intr = spec.intrinsics;
  const std::uint64_t frame_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(frame));

  FrameBundle b;
  b.frame = frame;
  b.pose = camera_pose_at(spec, frame);

  struct Projected {
    Eigen::Vector3d cam;
    Point2 pixel;
    double rx = 0.0, ry = 0.0;
  };
  std::vector<Projected> proj(spec.instances.size());
  b.truth.resize(spec.instances.size());
  for (std::size_t i = 0; i < spec.instances.size(); ++i) {
    const auto& inst = spec.instances[i];
    const InstanceState st = instance_state(inst, frame);
    InstanceTruth& t = b.truth[i];
    t.id = inst.id;
    t.present = st.present;
    t.center = st.center;
    t.motion = st.motion;
    if (!st.present) continue;
    proj[i].cam = b.pose.to_camera(st.center);
    const double z = proj[i].cam.z();
    if (z <= kMinVisibleDepth) continue;
    proj[i].pixel = {intr.fx * proj[i].cam.x() / z + intr.cx, intr.fy * proj[i].cam.y() / z + intr.cy};
    proj[i].rx = intr.fx * inst.radius / z;
    proj[i].ry = intr.fy * inst.radius / z;
    t.visible = intr.contains(proj[i].pixel);
  }
  if (spec.occlusion) {
    std::vector<bool> hidden(spec.instances.size(), false);
    for (std::size_t i = 0; i < proj.size(); ++i) {
      if (!b.truth[i].visible) continue;
      for (std::size_t j = 0; j < proj.size(); ++j) {
        if (j == i || !b.truth[j].present || proj[j].cam.z() <= kMinVisibleDepth) continue;
        if (proj[j].cam.z() >= proj[i].cam.z()) continue;
        const double du = (proj[i].pixel.u - proj[j].pixel.u) / proj[j].rx;
        const double dv = (proj[i].pixel.v - proj[j].pixel.v) / proj[j].ry;
        if (du * du + dv * dv < 1.0) hidden[i] = true;
      }
    }
    for (std::size_t i = 0; i < proj.size(); ++i) {
      if (hidden[i]) b.truth[i].visible = false;
    }
  }
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (!b.truth[i].visible) continue;
    const BBox raw{proj[i].pixel.u - proj[i].rx, proj[i].pixel.v - proj[i].ry, proj[i].pixel.u + proj[i].rx,
                   proj[i].pixel.v + proj[i].ry};
    b.truth[i].bbox = BBox{std::max(0.0, raw.x_min), std::max(0.0, raw.y_min),
                           std::min(static_cast<double>(intr.width), raw.x_max),
                           std::min(static_cast<double>(intr.height), raw.y_max)};
  }

  // Depth: room background plus spheres, then sensor effects.
  std::vector<float> clean(static_cast<std::size_t>(intr.width) * static_cast<std::size_t>(intr.height));
  {
    const Eigen::Vector3d origin = b.pose.translation;
    std::vector<std::size_t> in_front;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      if (b.truth[i].present && proj[i].cam.z() > spec.instances[i].radius) in_front.push_back(i);
    }
    for (int y = 0; y < intr.height; ++y) {
      for (int x = 0; x < intr.width; ++x) {
        const Eigen::Vector3d ray((x - intr.cx) / intr.fx, (y - intr.cy) / intr.fy, 1.0);
        double t = room_exit(spec.room, origin, b.pose.rotation * ray);
        for (std::size_t i : in_front) t = std::min(t, ray_sphere(ray, proj[i].cam, spec.instances[i].radius));
        clean[static_cast<std::size_t>(y) * static_cast<std::size_t>(intr.width) + static_cast<std::size_t>(x)] =
            static_cast<float>(t);
      }
    }
  }
  {
    Rng rng(derive_seed(frame_seed, kDepthPurpose));
    std::vector<float> noisy(clean.size());
    const float missing = std::numeric_limits<float>::quiet_NaN();
    for (std::size_t k = 0; k < clean.size(); ++k) {
      double d = clean[k];
      if (spec.depth_noise > 0.0) d += spec.depth_noise * rng.normal();
      const bool dropped = spec.depth_dropout > 0.0 && rng.uniform() < spec.depth_dropout;
      noisy[k] = (dropped || !(clean[k] <= spec.depth_range) || !(d > 0.0)) ? missing : static_cast<float>(d);
    }
    b.depth = DepthMap(intr.width, intr.height, std::move(noisy));
  }

  // Proposals.
  Rng rng(derive_seed(frame_seed, kProposalPurpose));
  for (std::size_t i = 0; i < spec.instances.size(); ++i) {
    if (!b.truth[i].visible) continue;
    Proposal p;
    p.bbox = *b.truth[i].bbox;
    p.score = rng.uniform(0.5, 1.0);
    p.embedding = perturb(ctx.embeddings[i], spec.embedding_noise, rng);
    b.proposals.push_back(std::move(p));
    b.origins.push_back({ProposalOrigin::Kind::kInlier, spec.instances[i].id});
  }
  if (!spec.instances.empty()) {
    for (int k = 0; k < spec.lookalikes_per_frame; ++k) {
      const std::size_t i = static_cast<std::size_t>(rng.below(spec.instances.size()));
      const double a = rng.uniform(spec.lookalike_similarity_min, spec.lookalike_similarity_max);
      Proposal p;
      p.embedding = perturb(with_similarity(ctx.embeddings[i], a, rng), spec.embedding_noise, rng);
      p.score = rng.uniform(0.5, 1.0);
      p.bbox = random_box(rng, intr);
      if (spec.lookalike_background_only) {
        bool placed = false;
        for (int tries = 0; tries < kBackgroundPlacementTries && !placed; ++tries) {
          if (tries > 0) p.bbox = random_box(rng, intr);
          const Point2 c = p.bbox.center();
          const int px = std::clamp(static_cast<int>(std::lround(c.u)), 0, intr.width - 1);
          const int py = std::clamp(static_cast<int>(std::lround(c.v)), 0, intr.height - 1);
          placed = clean[static_cast<std::size_t>(py) * static_cast<std::size_t>(intr.width) +
                         static_cast<std::size_t>(px)] > spec.depth_range;
        }
        if (!placed) continue;
      }
      b.proposals.push_back(std::move(p));
      b.origins.push_back({ProposalOrigin::Kind::kLookalike, spec.instances[i].id});
    }
  }
  for (int k = 0; k < spec.distractors_per_frame; ++k) {
    Proposal p;
    p.bbox = random_box(rng, intr);
    p.score = rng.uniform(0.0, 1.0);
    p.embedding = random_unit(rng, spec.embedding_dim);
    b.proposals.push_back(std::move(p));
    b.origins.push_back({ProposalOrigin::Kind::kDistractor, -1});
  }
  // Fisher-Yates so inliers are not always listed first.
  for (std::size_t k = b.proposals.size(); k > 1; --k) {
    const std::size_t j = static_cast<std::size_t>(rng.below(k));
    std::swap(b.proposals[k - 1], b.proposals[j]);
    std::swap(b.origins[k - 1], b.origins[j]);
  }
  return b;
}

}  // namespace

void SceneSpec::validate() const {
  if (frame_count < 0 || frame_count > kMaxSceneFrames) invalid("frame_count", "must be in [0, 1000000]");
  try {
    intrinsics.validate();
  } catch (const Error& e) {
    invalid("intrinsics", e.detail());
  }
  if (!room.min().allFinite() || !room.max().allFinite() || !(room.min().array() < room.max().array()).all()) {
    invalid("room", "min must be strictly below max on every axis");
  }
  if (embedding_dim < 1 || embedding_dim > kMaxEmbeddingDim) invalid("embedding_dim", "must be in [1, 4096]");

  std::set<InstanceId> ids;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const std::string path = "instances[" + std::to_string(i) + "]";
    if (!ids.insert(inst.id).second) invalid(path + ".id", "duplicate instance id");
    if (inst.id < 0) invalid(path + ".id", "must be non-negative");
    if (inst.embedding.size() != 0) {
      if (inst.embedding.size() != embedding_dim) invalid(path + ".embedding", "length differs from embedding_dim");
      if (!inst.embedding.allFinite() || std::abs(inst.embedding.norm() - 1.0) > kUnitNormTolerance) {
        invalid(path + ".embedding", "must be a unit vector");
      }
    }
    if (!(inst.radius > 0.0) || !std::isfinite(inst.radius)) invalid(path + ".radius", "must be positive");
    for (std::size_t k = 0; k < inst.schedule.size(); ++k) {
      const auto& p = inst.schedule[k];
      const std::string ppath = path + ".schedule[" + std::to_string(k) + "]";
      if (p.start < 0 || p.end < p.start) invalid(ppath, "needs 0 <= start <= end");
      if (p.end >= frame_count) invalid(ppath + ".end", "must be below frame_count");
      if (k > 0 && p.start <= inst.schedule[k - 1].end) invalid(ppath, "overlaps or precedes the previous placement");
      if (!p.position.allFinite() || !room.contains(p.position)) invalid(ppath + ".position", "must lie inside the room");
    }
  }
  if (distractors_per_frame < 0 || distractors_per_frame > kMaxClutter) {
    invalid("distractors_per_frame", "must be in [0, 1000]");
  }
  if (lookalikes_per_frame < 0 || lookalikes_per_frame > kMaxClutter) {
    invalid("lookalikes_per_frame", "must be in [0, 1000]");
  }
  if (!(lookalike_similarity_min >= -1.0 && lookalike_similarity_min <= lookalike_similarity_max &&
        lookalike_similarity_max <= 1.0)) {
    invalid("lookalike_similarity_min", "need -1 <= min <= max <= 1");
  }
  if (!finite_nonneg(embedding_noise)) invalid("embedding_noise", "must be >= 0");
  if (!finite_nonneg(depth_noise)) invalid("depth_noise", "must be >= 0");
  if (!(depth_dropout >= 0.0 && depth_dropout < 1.0)) invalid("depth_dropout", "must be in [0, 1)");
  if (!(depth_range > 0.0)) invalid("depth_range", "must be positive");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    const std::string path = "waypoints[" + std::to_string(i) + "]";
    if (!w.position.allFinite() || !room.contains(w.position)) invalid(path + ".position", "must lie inside the room");
    if (!w.look_at.allFinite() || (w.look_at - w.position).norm() < 1e-6) {
      invalid(path + ".look_at", "must differ from position");
    }
  }
  if (!finite_nonneg(angular_jitter)) invalid("angular_jitter", "must be >= 0");
  if (!finite_nonneg(svoe_min_area)) invalid("svoe_min_area", "must be >= 0");
  if (mvpe_views < 1 || mvpe_views > kMaxClutter) invalid("mvpe_views", "must be in [1, 1000]");
  if (!finite_nonneg(mvpe_view_noise)) invalid("mvpe_view_noise", "must be >= 0");
  if (box_stride < 1) invalid("box_stride", "must be >= 1");
}

const InstanceTruth* FrameBundle::truth_for(InstanceId id) const {
  for (const auto& t : truth) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<Embedding> resolve_embeddings(const SceneSpec& spec) {
  std::vector<Embedding> out;
  out.reserve(spec.instances.size());
  for (std::size_t i = 0; i < spec.instances.size(); ++i) {
    if (spec.instances[i].embedding.size() != 0) {
      out.push_back(spec.instances[i].embedding.normalized());
    } else {
      Rng rng(derive_seed(spec.seed, kEmbeddingStream + i));
      out.push_back(random_unit(rng, spec.embedding_dim));
    }
  }
  return out;
}

CameraPose camera_pose_at(const SceneSpec& spec, FrameIndex frame) {
  Eigen::Vector3d eye;
  Eigen::Vector3d target;
  const auto& w = spec.waypoints;
  if (w.empty()) {
    eye = Eigen::Vector3d(spec.room.center().x(), spec.room.center().y(), spec.room.min().z() + 1.5);
    target = eye + Eigen::Vector3d::UnitX();
  } else if (w.size() == 1 || spec.frame_count <= 1) {
    eye = w.front().position;
    target = w.front().look_at;
  } else {
    const double u = static_cast<double>(frame) / static_cast<double>(spec.frame_count - 1) *
                     static_cast<double>(w.size() - 1);
    const std::size_t last = w.size() - 1;
    const std::size_t k = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))), last - 1);
    const double t = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    const std::size_t k0 = k == 0 ? 0 : k - 1;
    const std::size_t k3 = std::min(k + 2, last);
    eye = catmull_rom(w[k0].position, w[k].position, w[k + 1].position, w[k3].position, t);
    target = catmull_rom(w[k0].look_at, w[k].look_at, w[k + 1].look_at, w[k3].look_at, t);
    // Keep the eye inside the room when the spline overshoots.
    for (int a = 0; a < 3; ++a) eye[a] = std::clamp(eye[a], spec.room.min()[a] + 1e-3, spec.room.max()[a] - 1e-3);
  }
  CameraPose pose = CameraPose::look_at(eye, target, Eigen::Vector3d::UnitZ(), frame);
  if (spec.angular_jitter > 0.0) {
    Rng rng(derive_seed(spec.seed, kJitterStream + static_cast<std::uint64_t>(frame)));
    const double yaw = spec.angular_jitter * rng.normal();
    const double pitch = spec.angular_jitter * rng.normal();
    const Eigen::Matrix3d jitter =
        (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
    pose.rotation = pose.rotation * jitter;
  }
  return pose;
}

std::vector<FrameBundle> generate_scene(const SceneSpec& spec, unsigned threads) {
  spec.validate();
  const SceneContext ctx{spec, resolve_embeddings(spec)};
  const auto n = static_cast<std::size_t>(spec.frame_count);
  std::vector<FrameBundle> frames(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t f = 0; f < n; ++f) frames[f] = generate_frame(ctx, static_cast<FrameIndex>(f));
    return frames;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t f = w; f < n; f += workers) frames[f] = generate_frame(ctx, static_cast<FrameIndex>(f));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return frames;
}

std::vector<GroundTruthInstance> build_annotations(const SceneSpec& spec, std::span<const FrameBundle> frames) {
  std::vector<GroundTruthInstance> out;
  for (std::size_t i = 0; i < spec.instances.size(); ++i) {
    const auto& inst = spec.instances[i];
    GroundTruthInstance gt;
    gt.id = inst.id;
    gt.motion.assign(frames.size(), MotionState::kDynamic);
    for (const auto& p : inst.schedule) {
      if (p.start >= static_cast<FrameIndex>(frames.size())) continue;
      const FrameIndex end = std::min<FrameIndex>(p.end, static_cast<FrameIndex>(frames.size()) - 1);
      gt.stationary_intervals.push_back({p.start, end, p.position});
      for (FrameIndex f = p.start; f <= end; ++f) gt.motion[static_cast<std::size_t>(f)] = MotionState::kStationary;
    }
    for (const auto& b : frames) {
      const InstanceTruth& t = b.truth[i];
      gt.visibility[b.frame] = t.visible;
      if (t.visible && t.bbox && t.bbox->valid() && b.frame % spec.box_stride == 0) gt.boxes_2d[b.frame] = *t.bbox;
    }
    out.push_back(std::move(gt));
  }
  return out;
}

Enrollment build_enrollment(const SceneSpec& spec, std::span<const FrameBundle> frames) {
  Enrollment e;
  e.mvpe_dim = spec.embedding_dim;
  const auto embeddings = resolve_embeddings(spec);
  const CameraIntrinsics& intr = spec.intrinsics;
  for (std::size_t i = 0; i < spec.instances.size(); ++i) {
    const InstanceId id = spec.instances[i].id;
    // First fully visible box of sufficient area; otherwise the first fully visible one.
    std::optional<SvoeRecord> first;
    std::optional<SvoeRecord> best;
    for (const auto& b : frames) {
      const InstanceTruth& t = b.truth[i];
      if (!t.visible || !t.bbox) continue;
      const BBox& box = *t.bbox;
      const Projection p = project_to_pixel(t.center, intr, b.pose);
      const double rx = intr.fx * spec.instances[i].radius / p.depth;
      const double ry = intr.fy * spec.instances[i].radius / p.depth;
      const bool inside = p.pixel.u - rx >= 0.0 && p.pixel.v - ry >= 0.0 && p.pixel.u + rx <= intr.width &&
                          p.pixel.v + ry <= intr.height;
      if (!inside) continue;
      if (!first) first = SvoeRecord{id, b.frame, box};
      if (box.area() >= spec.svoe_min_area) {
        best = SvoeRecord{id, b.frame, box};
        break;
      }
    }
    if (best) {
      e.svoe.push_back(*best);
    } else if (first) {
      e.svoe.push_back(*first);
    }

    MvpeRecord rec{id, {}, {}};
    Rng rng(derive_seed(spec.seed, kMvpeStream + i));
    for (int v = 0; v < spec.mvpe_views; ++v) rec.views.push_back(perturb(embeddings[i], spec.mvpe_view_noise, rng));
    e.mvpe.push_back(std::move(rec));
  }
  return e;
}

Dataset to_dataset(const SceneSpec& spec, std::span<const FrameBundle> frames) {
  Dataset ds;
  ds.intrinsics = spec.intrinsics;
  ds.proposals.dim = spec.embedding_dim;
  for (const auto& b : frames) {
    ds.poses.push_back(b.pose);
    ds.depth.push_back(b.depth);
    if (!b.proposals.empty()) ds.proposals.frames[b.frame] = b.proposals;
  }
  ds.annotations = build_annotations(spec, frames);
  ds.enrollment = build_enrollment(spec, frames);
  return ds;
}

Manifest export_dataset(std::span<const FrameBundle> frames, const SceneSpec& spec,
                        const std::filesystem::path& out_dir) {
  return write_dataset(to_dataset(spec, frames), out_dir);
}

namespace presets {

namespace {

Point3 table_point(Rng& rng, double x_half, double y_lo, double y_hi) {
  return {rng.uniform(-x_half, x_half), rng.uniform(y_lo, y_hi), 0.8};
}

/// Table positions with consecutive entries at least `min_gap` apart.
std::vector<Point3> relocation_chain(Rng& rng, std::size_t count, double min_gap, double x_half, double y_lo,
                                     double y_hi) {
  std::vector<Point3> out;
  while (out.size() < count) {
    const Point3 p = table_point(rng, x_half, y_lo, y_hi);
    if (!out.empty() && (p - out.back()).norm() < min_gap) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace

SceneSpec standard(std::uint64_t seed) {
  SceneSpec s;
  s.seed = seed;
  s.frame_count = 300;
  s.room = Eigen::AlignedBox3d(Eigen::Vector3d(-4, -4, 0), Eigen::Vector3d(4, 4, 3));
  Rng rng(derive_seed(seed, kEmbeddingStream - 1));
  const auto a = relocation_chain(rng, 2, 0.5, 0.9, -0.3, 0.5);
  const auto b = relocation_chain(rng, 2, 0.5, 0.9, -0.3, 0.5);
  s.instances.push_back({1, {}, 0.08, {{0, 119, a[0]}, {140, 299, a[1]}}});
  s.instances.push_back({2, {}, 0.08, {{0, 179, b[0]}, {180, 299, b[1]}}});
  s.waypoints = {{{-1.2, -2.6, 1.5}, {0.0, 0.0, 0.8}},
                 {{0.0, -2.9, 1.6}, {0.2, 0.1, 0.8}},
                 {{1.2, -2.6, 1.5}, {0.0, 0.0, 0.8}},
                 {{0.0, -2.4, 1.5}, {-0.2, 0.0, 0.8}}};
  s.angular_jitter = 0.01;
  s.embedding_noise = 0.05;
  s.depth_noise = 0.01;
  s.depth_dropout = 0.02;
  s.distractors_per_frame = 3;
  return s;
}

SceneSpec perfect_information(std::uint64_t seed) {
  SceneSpec s;
  s.seed = seed;
  s.frame_count = 200;
  s.room = Eigen::AlignedBox3d(Eigen::Vector3d(-4, -4, 0), Eigen::Vector3d(4, 4, 3));
  Rng rng(derive_seed(seed, kEmbeddingStream - 1));
  const Point3 p = table_point(rng, 0.2, -0.1, 0.1);
  s.instances.push_back({1, {}, 0.05, {{0, 199, p}}});
  s.waypoints = {{{-0.4, -1.2, 1.2}, p}, {{0.0, -1.0, 1.3}, p}, {{0.4, -1.2, 1.2}, p}};
  s.distractors_per_frame = 3;
  return s;
}

SceneSpec relocation(std::uint64_t seed, double depth_noise) {
  SceneSpec s;
  s.seed = seed;
  s.frame_count = 150;
  s.room = Eigen::AlignedBox3d(Eigen::Vector3d(-4, -4, 0), Eigen::Vector3d(4, 4, 3));
  Rng rng(derive_seed(seed, kEmbeddingStream - 1));
  const auto chain = relocation_chain(rng, 3, 0.5, 0.6, -0.2, 0.2);
  s.instances.push_back({1, {}, 0.05, {{0, 49, chain[0]}, {50, 99, chain[1]}, {100, 149, chain[2]}}});
  s.waypoints = {{{-0.2, -2.0, 1.4}, {0.0, 0.0, 0.8}}, {{0.2, -2.0, 1.4}, {0.0, 0.0, 0.8}}};
  s.embedding_noise = 0.02;
  s.depth_noise = depth_noise;
  s.distractors_per_frame = 2;
  return s;
}

SceneSpec distractor_heavy(std::uint64_t seed) {
  SceneSpec s;
  s.seed = seed;
  s.frame_count = 200;
  s.room = Eigen::AlignedBox3d(Eigen::Vector3d(-8, -8, 0), Eigen::Vector3d(8, 8, 3));
  Rng rng(derive_seed(seed, kEmbeddingStream - 1));
  const auto a = relocation_chain(rng, 2, 0.5, 0.8, -0.3, 0.4);
  const auto b = relocation_chain(rng, 1, 0.5, 0.8, -0.3, 0.4);
  s.instances.push_back({1, {}, 0.08, {{0, 99, a[0]}, {120, 199, a[1]}}});
  s.instances.push_back({2, {}, 0.08, {{0, 199, b[0]}}});
  s.waypoints = {{{-0.8, -2.2, 1.5}, {0.0, 0.0, 0.8}},
                 {{0.0, -2.5, 1.6}, {0.0, 0.1, 0.8}},
                 {{0.8, -2.2, 1.5}, {0.0, 0.0, 0.8}}};
  s.angular_jitter = 0.01;
  s.embedding_noise = 0.12;
  s.depth_noise = 0.01;
  s.depth_range = 4.0;
  s.distractors_per_frame = 3;
  s.lookalikes_per_frame = 4;
  s.lookalike_similarity_min = 0.6;
  s.lookalike_similarity_max = 0.9;
  s.lookalike_background_only = true;
  s.box_stride = 1;
  return s;
}

}  // namespace presets

}  // namespace egotrack
