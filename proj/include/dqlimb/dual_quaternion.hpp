// Copyright 2026 The dqlimb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Dual quaternions D = primary + eps * dual with eps^2 = 0.
///
/// The dual unit is never stored; nilpotency lives in the product formula.
/// Two conjugates are in use:
///   - conjugate():            q0* - eps q1*   (point sandwich D P D*)
///   - quaternion_conjugate(): q0* + eps q1*   (inverse of a unit pose,
///                                              twist/wrench transport)

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "dqlimb/error.hpp"
#include "dqlimb/quaternion.hpp"

namespace dqlimb {

struct DualQuaternion {
  Quaternion primary;
  Quaternion dual;

  constexpr DualQuaternion() = default;
  constexpr DualQuaternion(const Quaternion& p, const Quaternion& d) : primary(p), dual(d) {}
  constexpr explicit DualQuaternion(const Quaternion& p) : primary(p) {}

  static constexpr DualQuaternion identity() { return DualQuaternion(Quaternion::identity()); }

  bool is_finite() const { return primary.is_finite() && dual.is_finite(); }

  /// |primary| = 1 and <primary, dual> = 0 (4D dot) within tol.
  bool is_unit(double tol = kUnitTolerance) const {
    const double dot = primary.w * dual.w + primary.x * dual.x + primary.y * dual.y +
                       primary.z * dual.z;
    return std::abs(primary.norm() - 1.0) <= tol && std::abs(dot) <= tol;
  }

  constexpr DualQuaternion conjugate() const { return {primary.conjugate(), -dual.conjugate()}; }
  constexpr DualQuaternion quaternion_conjugate() const {
    return {primary.conjugate(), dual.conjugate()};
  }

  constexpr DualQuaternion operator-() const { return {-primary, -dual}; }
  constexpr DualQuaternion operator+(const DualQuaternion& o) const {
    return {primary + o.primary, dual + o.dual};
  }
  constexpr DualQuaternion operator-(const DualQuaternion& o) const {
    return {primary - o.primary, dual - o.dual};
  }
  constexpr DualQuaternion operator*(double s) const { return {primary * s, dual * s}; }

  // (a0 + eps a1)(b0 + eps b1) = a0 b0 + eps (a0 b1 + a1 b0)
  constexpr DualQuaternion operator*(const DualQuaternion& o) const {
    return {primary * o.primary, primary * o.dual + dual * o.primary};
  }

  constexpr bool operator==(const DualQuaternion&) const = default;
};

constexpr DualQuaternion operator*(double s, const DualQuaternion& d) { return d * s; }

constexpr DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b) { return a * b; }
constexpr DualQuaternion dq_conjugate(const DualQuaternion& d) { return d.conjugate(); }

/// (ab - ba)/2. On twists this is the Lie bracket: (w1 x w2, w1 x v2 + v1 x w2).
constexpr DualQuaternion dq_cross(const DualQuaternion& a, const DualQuaternion& b) {
  return (a * b - b * a) * 0.5;
}

/// Twist xi = w + eps v: angular velocity (rad/s) and linear velocity (m/s)
/// of the frame origin, both in the same frame.
struct Twist {
  PureQuaternion angular;
  PureQuaternion linear;

  constexpr DualQuaternion to_dq() const { return {Quaternion(angular), Quaternion(linear)}; }
  static constexpr Twist from_dq(const DualQuaternion& d) {
    return {d.primary.vector(), d.dual.vector()};
  }
  constexpr Twist operator+(const Twist& o) const {
    return {angular + o.angular, linear + o.linear};
  }
  constexpr Twist operator*(double s) const { return {angular * s, linear * s}; }
  constexpr bool operator==(const Twist&) const = default;
};

/// Wrench zeta = f + eps tau: force (N) and torque (N m) about the frame origin.
struct Wrench {
  PureQuaternion force;
  PureQuaternion torque;

  constexpr DualQuaternion to_dq() const { return {Quaternion(force), Quaternion(torque)}; }
  static constexpr Wrench from_dq(const DualQuaternion& d) {
    return {d.primary.vector(), d.dual.vector()};
  }
  constexpr Wrench operator+(const Wrench& o) const {
    return {force + o.force, torque + o.torque};
  }
  constexpr bool operator==(const Wrench&) const = default;
};

/// Pure rotation: cos(angle/2) + axis sin(angle/2), zero dual part.
inline DualQuaternion rotation_dq(const PureQuaternion& axis, double angle) {
  return DualQuaternion(axis_angle(axis, angle));
}

/// Pure translation 1 + eps (distance/2) axis. Any axis is accepted when
/// distance is zero.
inline DualQuaternion translation_dq(const PureQuaternion& axis, double distance) {
  if (distance == 0.0) return DualQuaternion::identity();
  if (!axis.is_unit()) throw NonUnitAxis("translation axis must have unit norm");
  return {Quaternion::identity(), Quaternion(axis * (distance / 2.0))};
}

/// Translation by an arbitrary displacement vector.
constexpr DualQuaternion translation_dq(const PureQuaternion& displacement) {
  return {Quaternion::identity(), Quaternion(displacement * 0.5)};
}

/// Point embedding 1 + eps p.
constexpr DualQuaternion point_dq(const PureQuaternion& p) {
  return {Quaternion::identity(), Quaternion(p)};
}

/// Inverse of point_dq: the vector part of the dual component.
constexpr PureQuaternion point_of(const DualQuaternion& d) { return d.dual.vector(); }

/// Pose that rotates by r and then translates by p: r + eps (1/2) p r.
/// Maps coordinates of the child frame into the parent frame.
constexpr DualQuaternion pose_dq(const Quaternion& r, const PureQuaternion& p) {
  return {r, Quaternion(p) * r * 0.5};
}

/// Translation of a unit pose, 2 dual primary*.
constexpr PureQuaternion translation_of(const DualQuaternion& pose) {
  return (pose.dual * pose.primary.conjugate() * 2.0).vector();
}

/// Point action D P D* with the eps-negating conjugate; returns the moved point.
constexpr PureQuaternion transform_point(const DualQuaternion& pose, const PureQuaternion& p) {
  return point_of(pose * point_dq(p) * pose.conjugate());
}

/// Screw transport x d x~ of a twist or wrench: re-expresses a twist given
/// in the child frame of `pose` in its parent frame (same for wrenches).
constexpr DualQuaternion adjoint(const DualQuaternion& pose, const DualQuaternion& d) {
  return pose * d * pose.quaternion_conjugate();
}
constexpr Twist adjoint(const DualQuaternion& pose, const Twist& xi) {
  return Twist::from_dq(adjoint(pose, xi.to_dq()));
}
constexpr Wrench adjoint(const DualQuaternion& pose, const Wrench& zeta) {
  return Wrench::from_dq(adjoint(pose, zeta.to_dq()));
}

// Time derivatives for constant-structure motions.

/// d/dt rotation_dq(axis, angle(t)) = 1/2 D_R Omega with Omega = angle_rate axis.
inline DualQuaternion rotation_dq_rate(const PureQuaternion& axis, double angle,
                                       double angle_rate) {
  const DualQuaternion omega(Quaternion(axis * angle_rate));
  return rotation_dq(axis, angle) * omega * 0.5;
}

/// d/dt rotation_dq(axis, angle(t))* = -1/2 Omega D_R*.
inline DualQuaternion rotation_dq_conjugate_rate(const PureQuaternion& axis, double angle,
                                                 double angle_rate) {
  const DualQuaternion omega(Quaternion(axis * angle_rate));
  return omega * rotation_dq(axis, angle).conjugate() * -0.5;
}

/// d/dt translation_dq(axis(t), distance(t)) = eps (d'/2 t + d/2 t').
/// The limb model only uses fixed axes, so axis_rate defaults to zero.
constexpr DualQuaternion translation_dq_rate(const PureQuaternion& axis, double distance,
                                             double distance_rate,
                                             const PureQuaternion& axis_rate = {}) {
  return {Quaternion(0.0), Quaternion(axis * (distance_rate / 2.0) + axis_rate * (distance / 2.0))};
}

/// d/dt point_dq(p(t)) = eps p'.
constexpr DualQuaternion point_dq_rate(const PureQuaternion& velocity) {
  return {Quaternion(0.0), Quaternion(velocity)};
}

inline DualQuaternion normalized(const DualQuaternion& d) {
  const double n = d.primary.norm();
  const Quaternion p = d.primary / n;
  Quaternion q = d.dual / n;
  const double dot = p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
  q = q - p * dot;
  return {p, q};
}

/// 3x3 rotation matrix of a unit quaternion.
inline Eigen::Matrix3d rotation_matrix(const Quaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Homogeneous 4x4 matrix of a unit pose.
inline Eigen::Matrix4d dq_to_homogeneous(const DualQuaternion& pose) {
  if (!pose.is_unit()) throw NonUnitDualQuaternion("pose is not a unit dual quaternion");
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = rotation_matrix(pose.primary);
  h.topRightCorner<3, 1>() = translation_of(pose).to_vector();
  return h;
}

}  // namespace dqlimb
