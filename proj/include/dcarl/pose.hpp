#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

namespace dcarl {

using FrameIndex = std::int64_t;

// Sign-canonical unit quaternion: w >= 0, and if w == 0 the first nonzero
// component of (x, y, z) is positive. Removes the q / -q double cover.
inline Eigen::Quaterniond canonicalize(Eigen::Quaterniond q) {
  q.normalize();
  const double c[4] = {q.w(), q.x(), q.y(), q.z()};
  for (double v : c) {
    if (v > 0.0) return q;
    if (v < 0.0) {
      q.coeffs() = -q.coeffs();
      return q;
    }
  }
  return q;
}

struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::optional<FrameIndex> frame_index;

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
       std::optional<FrameIndex> index = std::nullopt)
      : rotation(canonicalize(q)), translation(t), frame_index(index) {}

  static Pose identity(std::optional<FrameIndex> index = std::nullopt) {
    return Pose(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(), index);
  }

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }
};

// a ∘ b: apply b first, then a. Keeps a's frame index.
inline Pose pose_compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation * b.rotation, a.translation + a.rotation * b.translation,
              a.frame_index);
}

inline Pose pose_inverse(const Pose& p) {
  const Eigen::Quaterniond qi = p.rotation.conjugate();
  return Pose(qi, -(qi * p.translation), p.frame_index);
}

// Geodesic angle between two rotations, radians in [0, pi].
inline double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // atan2 keeps precision near zero where acos of the dot product does not
  const Eigen::Quaterniond r = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

inline Eigen::Quaterniond axis_angle(const Eigen::Vector3d& axis, double radians) {
  return canonicalize(Eigen::Quaterniond(Eigen::AngleAxisd(radians, axis.normalized())));
}

// Shortest-arc spherical interpolation. Falls back to normalized lerp when the
// endpoints are nearly parallel.
inline Eigen::Quaterniond slerp(Eigen::Quaterniond q0, Eigen::Quaterniond q1, double t) {
  q0 = canonicalize(q0);
  q1 = canonicalize(q1);
  double dot = q0.dot(q1);
  if (dot < 0.0) {
    q1.coeffs() = -q1.coeffs();
    dot = -dot;
  }
  if (dot > 1.0 - 1e-8) {
    Eigen::Quaterniond q;
    q.coeffs() = (1.0 - t) * q0.coeffs() + t * q1.coeffs();
    return canonicalize(q);
  }
  const double theta = 2.0 * std::atan2((q0.coeffs() - q1.coeffs()).norm(), (q0.coeffs() + q1.coeffs()).norm());
  const double s = std::sin(theta);
  const double w0 = std::sin((1.0 - t) * theta) / s;
  const double w1 = std::sin(t * theta) / s;
  Eigen::Quaterniond q;
  q.coeffs() = w0 * q0.coeffs() + w1 * q1.coeffs();
  return canonicalize(q);
}

}  // namespace dcarl
