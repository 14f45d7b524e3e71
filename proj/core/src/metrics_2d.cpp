#include <cmath>

#include "egotrack/evaluation.hpp"

namespace egotrack {

void Tracking2DAccumulator::add(const std::optional<BBox>& pred, const BBox& gt) {
  ++frames_;
  if (!pred) return;
  const double overlap = iou(*pred, gt);
  for (int k = 0; k < kSuccessThresholdCount; ++k) {
    // k / 20.0 keeps every grid point exact (0.5 is 10 / 20).
    if (overlap >= static_cast<double>(k) / 20.0) ++success_[static_cast<std::size_t>(k)];
  }
  const Point2 pc = pred->center();
  const Point2 gc = gt.center();
  const double du = pc.u - gc.u;
  const double dv = pc.v - gc.v;
  if (std::hypot(du, dv) <= kCenterErrorThresholdPx) ++center_hits_;
  if (std::hypot(du / gt.width(), dv / gt.height()) <= kNormalizedCenterThreshold) ++normalized_hits_;
}

Metrics2D Tracking2DAccumulator::result() const {
  Metrics2D m;
  m.frames = frames_;
  if (frames_ == 0) return m;
  const double n = static_cast<double>(frames_);
  double success_sum = 0.0;
  for (std::size_t s : success_) success_sum += static_cast<double>(s) / n;
  m.auc = success_sum / kSuccessThresholdCount;
  m.precision = static_cast<double>(center_hits_) / n;
  m.normalized_precision = static_cast<double>(normalized_hits_) / n;
  return m;
}

Metrics2D metrics_2d(const std::map<FrameIndex, BBox>& pred, const std::map<FrameIndex, BBox>& gt) {
  Tracking2DAccumulator acc;
  for (const auto& [frame, box] : gt) {
    const auto it = pred.find(frame);
    acc.add(it == pred.end() ? std::nullopt : std::optional<BBox>(it->second), box);
  }
  return acc.result();
}

}  // namespace egotrack
