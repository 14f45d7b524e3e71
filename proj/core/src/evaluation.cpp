#include "egotrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "egotrack/error.hpp"

namespace egotrack {

// --- ground truth ---

std::optional<Point3> GroundTruthInstance::stationary_center(FrameIndex frame) const {
  // Intervals are ordered and disjoint.
  auto it = std::upper_bound(stationary_intervals.begin(), stationary_intervals.end(), frame,
                             [](FrameIndex f, const StationaryInterval& s) { return f < s.start; });
  if (it == stationary_intervals.begin()) return std::nullopt;
  --it;
  if (frame > it->end) return std::nullopt;
  return it->center;
}

bool GroundTruthInstance::is_stationary(FrameIndex frame) const {
  return stationary_center(frame).has_value();
}

std::map<FrameIndex, Point3> GroundTruthInstance::stationary_track() const {
  std::map<FrameIndex, Point3> track;
  for (const auto& s : stationary_intervals) {
    for (FrameIndex f = s.start; f <= s.end; ++f) track.emplace_hint(track.end(), f, s.center);
  }
  return track;
}

void GroundTruthInstance::validate(const CameraIntrinsics* intr) const {
  const std::string who = "instance " + std::to_string(id) + ": ";
  for (std::size_t i = 0; i < stationary_intervals.size(); ++i) {
    const auto& s = stationary_intervals[i];
    if (s.start < 0 || s.end < s.start) throw Error(ErrorCode::kValidation, who + "malformed stationary interval");
    if (!s.center.allFinite()) throw Error(ErrorCode::kValidation, who + "non-finite interval center");
    if (i > 0 && s.start <= stationary_intervals[i - 1].end) {
      throw Error(ErrorCode::kValidation, who + "stationary intervals overlap or are out of order");
    }
    const FrameIndex last = std::min<FrameIndex>(s.end, static_cast<FrameIndex>(motion.size()) - 1);
    for (FrameIndex f = s.start; f <= last; ++f) {
      if (motion[static_cast<std::size_t>(f)] != MotionState::kStationary) {
        throw Error(ErrorCode::kValidation, who + "frame " + std::to_string(f) +
                                                " lies in a stationary interval but is marked dynamic");
      }
    }
  }
  for (const auto& [frame, box] : boxes_2d) {
    if (!box.valid()) throw Error(ErrorCode::kValidation, who + "degenerate 2D box at frame " + std::to_string(frame));
    if (intr != nullptr && (box.x_min < 0.0 || box.y_min < 0.0 || box.x_max > intr->width || box.y_max > intr->height)) {
      throw Error(ErrorCode::kValidation, who + "2D box outside the image at frame " + std::to_string(frame));
    }
  }
}

void EvalConfig::validate() const {
  if (thresholds.empty()) throw Error(ErrorCode::kValidation, "at least one threshold is required");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || !std::isfinite(thresholds[i])) {
      throw Error(ErrorCode::kValidation, "thresholds must be positive");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::kValidation, "thresholds must be strictly increasing");
    }
  }
}

// --- counts ---

std::optional<double> ThresholdCounts::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ThresholdCounts::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ThresholdCounts& ThresholdCounts::operator+=(const ThresholdCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

std::optional<double> ErrorAccumulator::mean_l2() const {
  if (count == 0) return std::nullopt;
  return sum_l2 / static_cast<double>(count);
}

std::optional<double> ErrorAccumulator::mean_angular() const {
  if (count == 0) return std::nullopt;
  return sum_angular / static_cast<double>(count);
}

ErrorAccumulator& ErrorAccumulator::operator+=(const ErrorAccumulator& other) {
  sum_l2 += other.sum_l2;
  sum_angular += other.sum_angular;
  count += other.count;
  return *this;
}

const ThresholdCounts* MetricsReport::at_threshold(double tau) const {
  for (const auto& c : per_threshold) {
    if (std::abs(c.tau - tau) < 1e-12) return &c;
  }
  return nullptr;
}

// --- per-frame matching ---

namespace {

void check_unique_ids(std::span<const LabeledPoint> side, const char* which) {
  std::set<InstanceId> seen;
  for (const auto& p : side) {
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::kDuplicateId, std::string("duplicate ") + which + " id " + std::to_string(p.id));
    }
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
}

}  // namespace

FrameMatch match_frame(std::span<const LabeledPoint> gts, std::span<const LabeledPoint> preds,
                       double tau, bool identity_aware) {
  check_tau(tau);
  check_unique_ids(gts, "ground-truth");
  check_unique_ids(preds, "prediction");

  FrameMatch out;
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> pred_used(preds.size(), false);

  if (identity_aware) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (preds[p].id == gts[g].id && (gts[g].position - preds[p].position).norm() <= tau) {
          gt_used[g] = pred_used[p] = true;
          out.pairs.emplace_back(gts[g].id, preds[p].id);
        }
      }
    }
  } else {
    struct Candidate {
      double dist;
      std::size_t g;
      std::size_t p;
    };
    std::vector<Candidate> candidates;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      for (std::size_t p = 0; p < preds.size(); ++p) {
        const double d = (gts[g].position - preds[p].position).norm();
        if (d <= tau) candidates.push_back({d, g, p});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (gts[a.g].id != gts[b.g].id) return gts[a.g].id < gts[b.g].id;
      return preds[a.p].id < preds[b.p].id;
    });
    for (const auto& c : candidates) {
      if (gt_used[c.g] || pred_used[c.p]) continue;
      gt_used[c.g] = pred_used[c.p] = true;
      out.pairs.emplace_back(gts[c.g].id, preds[c.p].id);
    }
  }
  out.tp = out.pairs.size();
  out.fp = preds.size() - out.tp;
  out.fn = gts.size() - out.tp;
  return out;
}

FrameMatch oracle_match_frame(std::span<const LabeledPoint> gts, std::span<const LabeledPoint> preds,
                              double tau) {
  constexpr std::size_t kMaxSide = 8;
  if (gts.size() > kMaxSide || preds.size() > kMaxSide) {
    throw Error(ErrorCode::kSizeLimit, "oracle matching supports at most 8 points per side");
  }
  check_tau(tau);

  std::size_t best_tp = 0;
  double best_cost = 0.0;
  std::vector<int> best_assign(gts.size(), -1);
  std::vector<int> assign(gts.size(), -1);

  // Depth-first enumeration of every partial injective assignment gt -> pred.
  auto search = [&](auto&& self, std::size_t g, unsigned used, std::size_t tp, double cost) -> void {
    if (g == gts.size()) {
      if (tp > best_tp || (tp == best_tp && cost < best_cost)) {
        best_tp = tp;
        best_cost = cost;
        best_assign = assign;
      }
      return;
    }
    assign[g] = -1;
    self(self, g + 1, used, tp, cost);
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (used & (1u << p)) continue;
      const double d = (gts[g].position - preds[p].position).norm();
      if (d > tau) continue;
      assign[g] = static_cast<int>(p);
      self(self, g + 1, used | (1u << p), tp + 1, cost + d);
      assign[g] = -1;
    }
  };
  search(search, 0, 0u, 0, 0.0);

  FrameMatch out;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (best_assign[g] >= 0) out.pairs.emplace_back(gts[g].id, preds[static_cast<std::size_t>(best_assign[g])].id);
  }
  out.tp = best_tp;
  out.fp = preds.size() - best_tp;
  out.fn = gts.size() - best_tp;
  return out;
}

// --- sequence accumulation ---

namespace {

const GroundTruthInstance* find_instance(std::span<const GroundTruthInstance> gts, InstanceId id) {
  for (const auto& g : gts) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

void check_predictions(const SequenceInput& seq) {
  if (seq.predictions == nullptr) return;
  for (const auto& [id, traj] : *seq.predictions) {
    if (find_instance(seq.ground_truth, id) == nullptr) {
      throw Error(ErrorCode::kValidation, "prediction for unknown instance " + std::to_string(id));
    }
    if (!traj.entries.empty() &&
        (traj.entries.begin()->first < 0 || traj.entries.rbegin()->first >= seq.frame_count)) {
      throw Error(ErrorCode::kFrameMismatch, "instance " + std::to_string(id) +
                                                 " has predictions outside the sequence's frame range");
    }
  }
}

}  // namespace

std::vector<ThresholdCounts> accumulate_pr(std::span<const SequenceInput> sequences, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<ThresholdCounts> totals;
  for (double tau : cfg.thresholds) totals.push_back({tau, 0, 0, 0});

  std::vector<LabeledPoint> gts;
  std::vector<LabeledPoint> preds;
  for (const auto& seq : sequences) {
    check_predictions(seq);
    for (FrameIndex f = 0; f < seq.frame_count; ++f) {
      gts.clear();
      preds.clear();
      for (const auto& inst : seq.ground_truth) {
        if (const auto c = inst.stationary_center(f)) gts.push_back({inst.id, *c});
      }
      if (seq.predictions != nullptr) {
        for (const auto& [id, traj] : *seq.predictions) {
          const auto p = traj.at(f);
          if (!p) continue;
          if (cfg.evaluate_stationary_only && !find_instance(seq.ground_truth, id)->is_stationary(f)) continue;
          preds.push_back({id, *p});
        }
      }
      if (gts.empty() && preds.empty()) continue;
      for (auto& t : totals) {
        const FrameMatch m = match_frame(gts, preds, t.tau, cfg.identity_aware);
        t += ThresholdCounts{t.tau, m.tp, m.fp, m.fn};
      }
    }
  }
  return totals;
}

ErrorAccumulator paired_errors(const std::map<FrameIndex, Point3>& gt, const Trajectory& pred,
                               std::span<const CameraPose> poses) {
  ErrorAccumulator acc;
  for (const auto& [frame, gt_point] : gt) {
    const auto p = pred.at(frame);
    if (!p) continue;
    if (frame < 0 || static_cast<std::size_t>(frame) >= poses.size()) {
      throw Error(ErrorCode::kFrameMismatch, "no camera pose for frame " + std::to_string(frame));
    }
    acc.sum_l2 += (gt_point - *p).norm();
    acc.sum_angular += angular_error(gt_point, *p, poses[static_cast<std::size_t>(frame)]);
    ++acc.count;
  }
  return acc;
}

MetricsReport evaluate(std::span<const SequenceInput> sequences, const EvalConfig& cfg) {
  MetricsReport report;
  report.per_threshold = accumulate_pr(sequences, cfg);
  ErrorAccumulator errors;
  for (const auto& seq : sequences) {
    if (seq.predictions == nullptr) continue;
    for (const auto& inst : seq.ground_truth) {
      const auto it = seq.predictions->find(inst.id);
      if (it == seq.predictions->end()) continue;
      errors += paired_errors(inst.stationary_track(), it->second, seq.poses);
    }
  }
  report.mean_l2 = errors.mean_l2();
  report.mean_angular = errors.mean_angular();
  report.paired_count = errors.count;
  return report;
}

// --- table ---

namespace {

std::string cell(const std::optional<double>& v, double scale, int precision) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, *v * scale);
  return buf;
}

}  // namespace

std::string format_report_table(const MetricsReport& report) {
  std::string header;
  std::string values;
  auto column = [&](const std::string& name, const std::string& value) {
    const std::size_t width = std::max<std::size_t>(std::max(name.size(), value.size()), 7) + 2;
    header += std::string(width - name.size(), ' ') + name;
    values += std::string(width - value.size(), ' ') + value;
  };
  for (const auto& t : report.per_threshold) {
    char tau[16];
    std::snprintf(tau, sizeof(tau), "%.2f", t.tau);
    column(std::string("P@") + tau, cell(t.precision(), 100.0, 2));
    column(std::string("R@") + tau, cell(t.recall(), 100.0, 2));
  }
  column("L2(m)", cell(report.mean_l2, 1.0, 3));
  column("Angle(rad)", cell(report.mean_angular, 1.0, 3));
  column("Paired", std::to_string(report.paired_count));
  std::string out = header + "\n" + values + "\n";
  if (report.tracking_2d) {
    const auto& m = *report.tracking_2d;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "2D: AUC %.2f  Precision %.2f  Norm.Precision %.2f  Frames %zu\n",
                  m.auc * 100.0, m.precision * 100.0, m.normalized_precision * 100.0, m.frames);
    out += buf;
  }
  return out;
}

}  // namespace egotrack
