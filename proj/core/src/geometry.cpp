#include "egotrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "egotrack/error.hpp"

namespace egotrack {

namespace {

constexpr double kRotationTolerance = 1e-6;
constexpr double kMinCameraZ = 1e-6;
constexpr double kMinRayLength = 1e-6;

}  // namespace

bool BBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void CameraIntrinsics::validate() const {
  std::ostringstream why;
  if (!(fx > 0.0) || !std::isfinite(fx)) why << "fx must be > 0; ";
  if (!(fy > 0.0) || !std::isfinite(fy)) why << "fy must be > 0; ";
  if (width <= 0 || height <= 0) why << "image size must be positive; ";
  if (!(cx >= 0.0 && cx < width)) why << "cx outside [0, width); ";
  if (!(cy >= 0.0 && cy < height)) why << "cy outside [0, height); ";
  const std::string msg = why.str();
  if (!msg.empty()) throw Error(ErrorCode::kValidation, "intrinsics: " + msg);
}

bool CameraIntrinsics::contains(const Point2& pixel) const {
  return pixel.u >= 0.0 && pixel.u < width && pixel.v >= 0.0 && pixel.v < height;
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

CameraPose CameraPose::identity(FrameIndex timestamp) {
  CameraPose pose;
  pose.timestamp = timestamp;
  return pose;
}

CameraPose CameraPose::from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
                                       FrameIndex timestamp) {
  CameraPose pose;
  pose.rotation = q.normalized().toRotationMatrix();
  pose.translation = t;
  pose.timestamp = timestamp;
  return pose;
}

CameraPose CameraPose::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                               const Eigen::Vector3d& up, FrameIndex timestamp) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // Looking straight along `up`; any perpendicular works.
    right = forward.unitOrthogonal();
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  CameraPose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  pose.timestamp = timestamp;
  return pose;
}

void CameraPose::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kValidation, "pose contains non-finite values");
  }
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance) {
    throw Error(ErrorCode::kValidation, "pose rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > kRotationTolerance) {
    throw Error(ErrorCode::kValidation, "pose rotation has det != 1");
  }
}

DepthMap::DepthMap(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorCode::kInvalidArgument, "negative depth map size");
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

DepthMap::DepthMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 0 || height < 0 ||
      values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kValidation, "depth map size does not match width x height");
  }
}

bool DepthMap::is_valid(double depth) {
  return std::isfinite(depth) && depth > 0.0 && depth <= kMaxValidDepth;
}

bool DepthMap::identical(const DepthMap& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         (values_.empty() ||
          std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0);
}

Point3 lift_to_world(const Point2& pixel, double depth, const CameraIntrinsics& intr,
                     const CameraPose& pose) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    throw Error(ErrorCode::kInvalidDepth, "lift requires a positive finite depth");
  }
  if (!intr.contains(pixel)) {
    throw Error(ErrorCode::kOutOfBounds, "lift pixel outside the image");
  }
  const Eigen::Vector3d p_cam((pixel.u - intr.cx) * depth / intr.fx,
                              (pixel.v - intr.cy) * depth / intr.fy, depth);
  return pose.to_world(p_cam);
}

Projection project_to_pixel(const Point3& point, const CameraIntrinsics& intr,
                            const CameraPose& pose) {
  if (!point.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite point");
  const Eigen::Vector3d p_cam = pose.to_camera(point);
  if (p_cam.z() <= kMinCameraZ) {
    throw Error(ErrorCode::kBehindCamera, "point is behind the camera");
  }
  return {{intr.fx * p_cam.x() / p_cam.z() + intr.cx, intr.fy * p_cam.y() / p_cam.z() + intr.cy},
          p_cam.z()};
}

std::optional<double> sample_depth(const DepthMap& map, const Point2& pixel, int radius) {
  if (map.width() == 0 || map.height() == 0 || !std::isfinite(pixel.u) || !std::isfinite(pixel.v)) {
    return std::nullopt;
  }
  if (pixel.u < 0.0 || pixel.v < 0.0 || pixel.u >= map.width() || pixel.v >= map.height()) {
    return std::nullopt;
  }
  const int x = std::clamp(static_cast<int>(std::lround(pixel.u)), 0, map.width() - 1);
  const int y = std::clamp(static_cast<int>(std::lround(pixel.v)), 0, map.height() - 1);
  if (const float center = map.at(x, y); DepthMap::is_valid(center)) return center;
  if (radius <= 0) return std::nullopt;

  std::vector<double> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int yy = std::max(0, y - radius); yy <= std::min(map.height() - 1, y + radius); ++yy) {
    for (int xx = std::max(0, x - radius); xx <= std::min(map.width() - 1, x + radius); ++xx) {
      if (const float d = map.at(xx, yy); DepthMap::is_valid(d)) window.push_back(d);
    }
  }
  if (window.empty()) return std::nullopt;
  const std::size_t mid = window.size() / 2;
  std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
  if (window.size() % 2 == 1) return window[mid];
  const double upper = window[mid];
  const double lower = *std::max_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double angular_error(const Point3& gt_world, const Point3& pred_world, const CameraPose& pose) {
  const Eigen::Vector3d a = pose.to_camera(gt_world);
  const Eigen::Vector3d b = pose.to_camera(pred_world);
  if (!a.allFinite() || !b.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite point");
  if (a.norm() <= kMinRayLength || b.norm() <= kMinRayLength) {
    throw Error(ErrorCode::kDegenerateRay, "point coincides with the camera center");
  }
  // atan2 form of arccos(a.b / |a||b|); stable near 0 and pi.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace egotrack
