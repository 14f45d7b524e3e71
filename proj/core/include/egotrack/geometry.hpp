#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace egotrack {

using FrameIndex = std::int64_t;

/// World-frame point in meters unless a function says otherwise.
using Point3 = Eigen::Vector3d;

struct Point2 {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Axis-aligned pixel box.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool valid() const;
  BBox scaled(double s) const { return {x_min * s, y_min * s, x_max * s, y_max * s}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

double iou(const BBox& a, const BBox& b);

/// Depth values outside (0, kMaxValidDepth] are treated as missing.
inline constexpr double kMaxValidDepth = 20.0;

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws Error(kValidation) when fx, fy or the principal point are out of range.
  void validate() const;
  bool contains(const Point2& pixel) const;
  Eigen::Matrix3d matrix() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// World-from-camera rigid transform: p_world = rotation * p_cam + translation.
/// Camera axes follow the pinhole convention (x right, y down, z forward).
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  FrameIndex timestamp = 0;

  static CameraPose identity(FrameIndex timestamp = 0);
  static CameraPose from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
                                    FrameIndex timestamp);
  /// Camera at `eye` looking at `target`; `up` fixes roll.
  static CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                            const Eigen::Vector3d& up, FrameIndex timestamp);

  Point3 to_world(const Eigen::Vector3d& p_cam) const { return rotation * p_cam + translation; }
  Eigen::Vector3d to_camera(const Point3& p_world) const {
    return rotation.transpose() * (p_world - translation);
  }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation); }

  /// Throws Error(kValidation) unless rotation is orthonormal with det +1 (tolerance 1e-6).
  void validate() const;
};

class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, float fill = 0.0f);
  DepthMap(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }

  static bool is_valid(double depth);

  /// Bitwise equality; NaN payloads compare equal to themselves.
  bool identical(const DepthMap& other) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

struct Projection {
  Point2 pixel;
  double depth = 0.0;
};

/// Back-projects `pixel` at camera-frame `depth` into the world frame.
/// Throws kInvalidDepth for depth <= 0 (or non-finite) and kOutOfBounds for pixels outside the image.
Point3 lift_to_world(const Point2& pixel, double depth, const CameraIntrinsics& intr,
                     const CameraPose& pose);

/// Throws kBehindCamera when the camera-frame z is <= 1e-6.
Projection project_to_pixel(const Point3& point, const CameraIntrinsics& intr,
                            const CameraPose& pose);

/// Nearest-pixel value when valid, otherwise the median of valid values in the
/// (2*radius+1)^2 window. Empty when nothing valid is found.
std::optional<double> sample_depth(const DepthMap& map, const Point2& pixel, int radius);

/// Angle in [0, pi] between the camera-center rays to the two points.
/// Throws kDegenerateRay if either point sits on the camera center.
double angular_error(const Point3& gt_world, const Point3& pred_world, const CameraPose& pose);

}  // namespace egotrack
