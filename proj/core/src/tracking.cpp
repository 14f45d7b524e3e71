#include "egotrack/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "egotrack/error.hpp"

namespace egotrack {

void Proposal::validate() const {
  if (!bbox.valid()) throw Error(ErrorCode::kValidation, "proposal bbox is degenerate");
  if (!std::isfinite(score)) throw Error(ErrorCode::kValidation, "proposal score is not finite");
  if (embedding.size() == 0 || !embedding.allFinite() ||
      std::abs(embedding.norm() - 1.0) >= kUnitNormTolerance) {
    throw Error(ErrorCode::kValidation, "proposal embedding is not unit norm");
  }
}

Template make_template(std::span<const Embedding> embeddings, EnrollmentMode source) {
  if (embeddings.empty()) throw Error(ErrorCode::kInvalidArgument, "template needs at least one view");
  if (source == EnrollmentMode::kSvoe && embeddings.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "SVOE templates take exactly one embedding");
  }
  const Eigen::Index dim = embeddings.front().size();
  if (dim == 0) throw Error(ErrorCode::kDimensionMismatch, "empty embedding");
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "template views differ in dimension");
  }

  // Summing in a canonical order makes the result bit-identical under permutation.
  std::vector<const Embedding*> order(embeddings.size());
  std::transform(embeddings.begin(), embeddings.end(), order.begin(), [](const Embedding& e) { return &e; });
  std::sort(order.begin(), order.end(), [](const Embedding* a, const Embedding* b) {
    return std::lexicographical_compare(a->data(), a->data() + a->size(), b->data(), b->data() + b->size());
  });
  Embedding mean = Embedding::Zero(dim);
  for (const Embedding* e : order) mean += *e;
  mean /= static_cast<double>(embeddings.size());

  const double norm = mean.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kDegenerateTemplate, "mean embedding is zero");
  }
  return {mean / norm, source, static_cast<int>(embeddings.size())};
}

namespace {

void check_dimension(const Proposal& p, const Template& tmpl) {
  if (p.embedding.size() != tmpl.embedding.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "proposal embedding has dimension " + std::to_string(p.embedding.size()) +
                    ", template has " + std::to_string(tmpl.embedding.size()));
  }
}

// True when `a` should be preferred over `b` at equal similarity.
bool wins_tie(const Proposal& a, const Proposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
  return a.bbox.y_min < b.bbox.y_min;
}

}  // namespace

std::optional<ProposalMatch> match_proposals(std::span<const Proposal> proposals,
                                             const Template& tmpl, double cosine_threshold) {
  std::optional<ProposalMatch> best;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    check_dimension(proposals[i], tmpl);
    const double sim = proposals[i].embedding.dot(tmpl.embedding);
    if (!best || sim > best->similarity ||
        (sim == best->similarity && wins_tie(proposals[i], proposals[best->index]))) {
      best = ProposalMatch{i, sim};
    }
  }
  if (!best || best->similarity < cosine_threshold) return std::nullopt;
  return best;
}

std::optional<BBox> guided_2d_select(std::span<const Proposal> proposals, const Point2& projected,
                                     const Template& tmpl, double cosine_threshold) {
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    check_dimension(proposals[i], tmpl);
    if (proposals[i].embedding.dot(tmpl.embedding) < cosine_threshold) continue;
    const Point2 c = proposals[i].bbox.center();
    const double dist = std::hypot(c.u - projected.u, c.v - projected.v);
    if (!best || dist < best_dist || (dist == best_dist && wins_tie(proposals[i], proposals[*best]))) {
      best = i;
      best_dist = dist;
    }
  }
  if (!best) return std::nullopt;
  return proposals[*best].bbox;
}

void TrackerConfig::validate() const {
  if (!(cosine_threshold >= -1.0 && cosine_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "cosine_threshold must lie in [-1, 1]");
  }
  if (!(reset_threshold > 0.0) || !std::isfinite(reset_threshold)) {
    throw Error(ErrorCode::kValidation, "reset_threshold must be > 0");
  }
  if (depth_window_radius < 0) throw Error(ErrorCode::kValidation, "depth_window_radius must be >= 0");
}

std::optional<Point3> Trajectory::at(FrameIndex frame) const {
  const auto it = entries.find(frame);
  if (it == entries.end()) return std::nullopt;
  return it->second.position;
}

bool Trajectory::operator==(const Trajectory& other) const {
  if (reset_frames != other.reset_frames || entries.size() != other.entries.size()) return false;
  return std::equal(entries.begin(), entries.end(), other.entries.begin(), [](const auto& a, const auto& b) {
    return a.first == b.first && a.second.provenance == b.second.provenance &&
           a.second.position == b.second.position;
  });
}

InstanceTracker::InstanceTracker(Template tmpl, CameraIntrinsics intr, TrackerConfig cfg)
    : template_(std::move(tmpl)), intr_(intr), cfg_(std::move(cfg)) {
  cfg_.validate();
  intr_.validate();
}

std::optional<Point3> InstanceTracker::detect(const FrameObservation& obs) const {
  if (cfg_.visible_only_update && obs.visible != true) return std::nullopt;
  const auto match = match_proposals(obs.proposals, template_, cfg_.cosine_threshold);
  if (!match || obs.depth == nullptr) return std::nullopt;
  const Point2 center = obs.proposals[match->index].bbox.center();
  if (!intr_.contains(center)) return std::nullopt;
  const auto depth = sample_depth(*obs.depth, center, cfg_.depth_window_radius);
  if (!depth) return std::nullopt;
  try {
    return lift_to_world(center, *depth, intr_, obs.pose);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<TrajectoryEntry> InstanceTracker::observe(const FrameObservation& obs) {
  if (last_frame_ && obs.frame <= *last_frame_) {
    throw Error(ErrorCode::kInvalidArgument, "frames must be fed in increasing order");
  }
  last_frame_ = obs.frame;
  std::optional<TrajectoryEntry> emitted;
  if (const auto z = detect(obs)) {
    if (cfg_.use_kalman) {
      if (!state_.kalman) {
        state_.kalman = KalmanState::initialize(*z, cfg_.kalman);
      } else {
        const KalmanStep step =
            kalman_step_with_reset(*state_.kalman, *z, cfg_.reset_threshold, cfg_.kalman.initial_covariance);
        state_.kalman = step.state;
        if (step.did_reset) trajectory_.reset_frames.push_back(obs.frame);
      }
      state_.memory = state_.kalman->position();
      emitted = TrajectoryEntry{*state_.memory, Provenance::kKalmanSmoothed};
    } else {
      state_.memory = *z;
      emitted = TrajectoryEntry{*z, Provenance::kFreshDetection};
    }
    state_.last_update_frame = obs.frame;
  } else if (state_.memory) {
    emitted = TrajectoryEntry{*state_.memory, Provenance::kMemoryCarry};
  }
  if (emitted) trajectory_.entries.emplace(obs.frame, *emitted);
  return emitted;
}

Trajectory track_instance(std::span<const FrameObservation> frames, const Template& tmpl,
                          const CameraIntrinsics& intr, const TrackerConfig& cfg) {
  InstanceTracker tracker(tmpl, intr, cfg);
  for (const auto& f : frames) tracker.observe(f);
  return std::move(tracker).take_trajectory();
}

}  // namespace egotrack
