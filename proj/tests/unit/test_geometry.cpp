#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "egotrack/error.hpp"
#include "egotrack/geometry.hpp"
#include "egotrack/random.hpp"

namespace egotrack {
namespace {

const CameraIntrinsics kVga{500.0, 500.0, 320.0, 240.0, 640, 480};

CameraPose translated(double x, double y, double z) {
  CameraPose p;
  p.translation = {x, y, z};
  return p;
}

// Straight-line pinhole back-projection, written independently of the library.
Point3 lift_oracle(double u, double v, double d, double fx, double fy, double cx, double cy,
                   double tx, double ty, double tz) {
  return {(u - cx) * d / fx + tx, (v - cy) * d / fy + ty, d + tz};
}

CameraPose random_pose(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return CameraPose::from_quaternion(q, {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}, 0);
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(LiftToWorld, PrincipalPointWithIdentityPose) {
  const Point3 p = lift_to_world({kVga.cx, kVga.cy}, 2.0, kVga, CameraPose::identity());
  EXPECT_EQ(p, Point3(0, 0, 2.0));
}

TEST(LiftToWorld, OffsetPixelAndTranslatedPose) {
  const Point3 p = lift_to_world({420, 240}, 2.0, kVga, translated(1, 0, 0));
  const Point3 want = lift_oracle(420, 240, 2.0, 500, 500, 320, 240, 1, 0, 0);
  EXPECT_NEAR((p - want).norm(), 0.0, 1e-12);
  EXPECT_NEAR(p.x(), 1.4, 1e-12);
  EXPECT_NEAR(p.z(), 2.0, 1e-12);
}

TEST(LiftToWorld, RejectsBadDepthAndPixel) {
  EXPECT_EQ(code_of([] { lift_to_world({10, 10}, 0.0, kVga, {}); }), ErrorCode::kInvalidDepth);
  EXPECT_EQ(code_of([] { lift_to_world({10, 10}, -1.0, kVga, {}); }), ErrorCode::kInvalidDepth);
  EXPECT_EQ(code_of([] { lift_to_world({10, 10}, std::nan(""), kVga, {}); }), ErrorCode::kInvalidDepth);
  EXPECT_EQ(code_of([] { lift_to_world({-1, 10}, 1.0, kVga, {}); }), ErrorCode::kOutOfBounds);
  EXPECT_EQ(code_of([] { lift_to_world({10, 480.5}, 1.0, kVga, {}); }), ErrorCode::kOutOfBounds);
}

TEST(ProjectToPixel, InverseOfLiftExample) {
  const Projection pr = project_to_pixel({1.4, 0, 2.0}, kVga, translated(1, 0, 0));
  EXPECT_NEAR(pr.pixel.u, 420, 1e-9);
  EXPECT_NEAR(pr.pixel.v, 240, 1e-9);
  EXPECT_NEAR(pr.depth, 2.0, 1e-12);
}

TEST(ProjectToPixel, CameraOriginIsBehind) {
  EXPECT_EQ(code_of([] { project_to_pixel({1, 2, 3}, kVga, translated(1, 2, 3)); }),
            ErrorCode::kBehindCamera);
  EXPECT_EQ(code_of([] { project_to_pixel({0, 0, -1}, kVga, {}); }), ErrorCode::kBehindCamera);
}

TEST(GeometryProperty, LiftProjectRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    CameraIntrinsics k;
    k.width = 64 + static_cast<int>(rng.below(1500));
    k.height = 48 + static_cast<int>(rng.below(1000));
    k.fx = rng.uniform(50, 2000);
    k.fy = rng.uniform(50, 2000);
    k.cx = rng.uniform(0, k.width - 1);
    k.cy = rng.uniform(0, k.height - 1);
    const CameraPose pose = random_pose(rng);
    const Point2 px{rng.uniform(0, k.width - 1), rng.uniform(0, k.height - 1)};
    const double d = rng.uniform(0.05, 20.0);
    const Projection back = project_to_pixel(lift_to_world(px, d, k, pose), k, pose);
    ASSERT_NEAR(back.pixel.u, px.u, 1e-4);
    ASSERT_NEAR(back.pixel.v, px.v, 1e-4);
    ASSERT_NEAR(back.depth, d, 1e-6);
  }
}

TEST(GeometryProperty, PoseIsRigid) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const CameraPose pose = random_pose(rng);
    const Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Vector3d b(rng.normal(), rng.normal(), rng.normal());
    ASSERT_NEAR((pose.to_world(a) - pose.to_world(b)).norm(), (a - b).norm(), 1e-9);
  }
}

TEST(CameraPose, ValidateRejectsReflection) {
  CameraPose p;
  p.rotation(0, 0) = -1.0;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kValidation);
  p.rotation = Eigen::Matrix3d::Identity() * 1.01;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kValidation);
  EXPECT_NO_THROW(CameraPose::identity().validate());
}

TEST(CameraPose, LookAtPointsOpticalAxisAtTarget) {
  const CameraPose p = CameraPose::look_at({1, 2, 1.5}, {4, -1, 0.5}, {0, 0, 1}, 3);
  EXPECT_NO_THROW(p.validate());
  const Eigen::Vector3d cam = p.to_camera({4, -1, 0.5});
  EXPECT_NEAR(cam.x(), 0.0, 1e-12);
  EXPECT_NEAR(cam.y(), 0.0, 1e-12);
  EXPECT_GT(cam.z(), 0.0);
  // World up maps to camera -y.
  EXPECT_LT((p.rotation.transpose() * Eigen::Vector3d::UnitZ()).y(), 0.0);
  EXPECT_EQ(p.timestamp, 3);
}

TEST(CameraIntrinsics, Validate) {
  EXPECT_NO_THROW(kVga.validate());
  CameraIntrinsics bad = kVga;
  bad.fx = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kValidation);
  bad = kVga;
  bad.cx = 640;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kValidation);
}

TEST(SampleDepth, ValidCenter) {
  DepthMap m(5, 5, 1.0f);
  m.at(2, 2) = 1.5f;
  EXPECT_DOUBLE_EQ(*sample_depth(m, {2.0, 2.0}, 0), 1.5);
  EXPECT_DOUBLE_EQ(*sample_depth(m, {2.4, 1.6}, 0), 1.5);
}

TEST(SampleDepth, MedianFallback) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  DepthMap m(3, 3, nan);
  m.at(0, 0) = 1.0f;
  m.at(2, 1) = 3.0f;
  m.at(1, 2) = 1.2f;
  m.at(2, 2) = -1.0f;
  EXPECT_NEAR(*sample_depth(m, {1, 1}, 1), 1.2, 1e-6);
}

TEST(SampleDepth, EvenCountMedianAveragesMiddlePair) {
  DepthMap m(3, 3, 0.0f);
  m.at(0, 0) = 1.0f;
  m.at(2, 2) = 2.0f;
  EXPECT_NEAR(*sample_depth(m, {1, 1}, 1), 1.5, 1e-6);
}

TEST(SampleDepth, AllMissingIsAbsent) {
  DepthMap m(4, 4, 0.0f);
  EXPECT_FALSE(sample_depth(m, {1, 1}, 2).has_value());
  m.at(0, 0) = 25.0f;  // beyond the valid range
  EXPECT_FALSE(sample_depth(m, {1, 1}, 2).has_value());
}

TEST(SampleDepth, RadiusZeroMatchesLookup) {
  Rng rng(3);
  DepthMap m(17, 13);
  for (float& v : m.values()) v = static_cast<float>(rng.uniform(0.1, 19.9));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      ASSERT_EQ(*sample_depth(m, {double(x), double(y)}, 0), double(m.at(x, y)));
}

TEST(AngularError, Examples) {
  const CameraPose id = CameraPose::identity();
  EXPECT_DOUBLE_EQ(angular_error({0.3, 0.2, 2}, {0.3, 0.2, 2}, id), 0.0);
  EXPECT_NEAR(angular_error({1, 0, 0}, {0, 1, 0}, id), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(angular_error({1, 0, 1}, {0, 0, 1}, id), std::acos(1 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(angular_error({0, 0, 1}, {0, 0, -1}, id), std::numbers::pi, 1e-12);
}

TEST(AngularError, UsesCameraCenter) {
  const CameraPose p = translated(1, 1, 1);
  EXPECT_NEAR(angular_error({2, 1, 1}, {1, 2, 1}, p), std::numbers::pi / 2, 1e-12);
  EXPECT_EQ(code_of([&] { angular_error({1, 1, 1}, {0, 0, 0}, p); }), ErrorCode::kDegenerateRay);
}

TEST(AngularError, SymmetricAndScaleInvariant) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const CameraPose pose = random_pose(rng);
    const Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Vector3d b(rng.normal(), rng.normal(), rng.normal());
    const double e = angular_error(pose.to_world(a), pose.to_world(b), pose);
    ASSERT_NEAR(e, angular_error(pose.to_world(b), pose.to_world(a), pose), 1e-12);
    ASSERT_NEAR(e, angular_error(pose.to_world(a * rng.uniform(0.1, 10)), pose.to_world(b), pose), 1e-7);
    ASSERT_GE(e, 0.0);
    ASSERT_LE(e, std::numbers::pi);
  }
}

TEST(BBox, IouAndValidity) {
  const BBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, {5, 0, 15, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou(a, {20, 20, 30, 30}), 0.0);
  EXPECT_TRUE(a.valid());
  EXPECT_FALSE((BBox{1, 0, 1, 5}).valid());
  EXPECT_EQ(a.center(), (Point2{5, 5}));
}

TEST(DepthMap, IdenticalTreatsNanBitwise) {
  DepthMap a(2, 1, std::numeric_limits<float>::quiet_NaN());
  DepthMap b = a;
  EXPECT_TRUE(a.identical(b));
  b.at(1, 0) = 1.0f;
  EXPECT_FALSE(a.identical(b));
}

}  // namespace
}  // namespace egotrack
