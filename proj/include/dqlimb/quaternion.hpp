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

/// Hamilton quaternions (ij = k, right-handed) and pure quaternions.
///
/// Quaternion is a plain value type; arithmetic never renormalizes. Use
/// normalized() explicitly where a unit quaternion is needed.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "dqlimb/error.hpp"

namespace dqlimb {

/// Tolerance on |norm - 1| accepted by operations that require unit inputs.
inline constexpr double kUnitTolerance = 1e-9;

struct PureQuaternion;

struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_)
      : w(w_), x(x_), y(y_), z(z_) {}
  constexpr explicit Quaternion(double scalar) : w(scalar) {}
  constexpr Quaternion(const PureQuaternion& p);  // NOLINT: implicit embedding

  /// Throws NonFiniteValue unless all components are finite.
  static Quaternion checked(double w, double x, double y, double z) {
    Quaternion q{w, x, y, z};
    if (!q.is_finite()) throw NonFiniteValue("quaternion component is not finite");
    return q;
  }

  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  constexpr double norm_squared() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_squared()); }
  bool is_finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  bool is_unit(double tol = kUnitTolerance) const {
    return std::abs(norm_squared() - 1.0) <= tol;
  }

  constexpr Quaternion conjugate() const { return {w, -x, -y, -z}; }
  constexpr PureQuaternion vector() const;

  Quaternion normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quaternion operator+(const Quaternion& o) const {
    return {w + o.w, x + o.x, y + o.y, z + o.z};
  }
  constexpr Quaternion operator-(const Quaternion& o) const {
    return {w - o.w, x - o.x, y - o.y, z - o.z};
  }
  constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  constexpr Quaternion operator/(double s) const { return {w / s, x / s, y / s, z / s}; }

  // Hamilton product.
  constexpr Quaternion operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  constexpr bool operator==(const Quaternion&) const = default;
};

constexpr Quaternion operator*(double s, const Quaternion& q) { return q * s; }

/// Quaternion with identically zero scalar part. Carries vectors: positions,
/// rotation axes, angular and linear velocities, forces and torques.
struct PureQuaternion {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr PureQuaternion() = default;
  constexpr PureQuaternion(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  explicit PureQuaternion(const Eigen::Vector3d& v) : x(v.x()), y(v.y()), z(v.z()) {}

  static constexpr PureQuaternion unit_x() { return {1.0, 0.0, 0.0}; }
  static constexpr PureQuaternion unit_y() { return {0.0, 1.0, 0.0}; }
  static constexpr PureQuaternion unit_z() { return {0.0, 0.0, 1.0}; }

  constexpr double norm_squared() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_squared()); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  bool is_unit(double tol = kUnitTolerance) const {
    return std::abs(norm() - 1.0) <= tol;
  }
  PureQuaternion normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  Eigen::Vector3d to_vector() const { return {x, y, z}; }

  constexpr PureQuaternion operator-() const { return {-x, -y, -z}; }
  constexpr PureQuaternion operator+(const PureQuaternion& o) const {
    return {x + o.x, y + o.y, z + o.z};
  }
  constexpr PureQuaternion operator-(const PureQuaternion& o) const {
    return {x - o.x, y - o.y, z - o.z};
  }
  constexpr PureQuaternion operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr PureQuaternion operator/(double s) const { return {x / s, y / s, z / s}; }

  constexpr bool operator==(const PureQuaternion&) const = default;
};

constexpr PureQuaternion operator*(double s, const PureQuaternion& p) { return p * s; }

constexpr Quaternion::Quaternion(const PureQuaternion& p) : w(0.0), x(p.x), y(p.y), z(p.z) {}
constexpr PureQuaternion Quaternion::vector() const { return {x, y, z}; }

constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) { return a * b; }
constexpr Quaternion quat_conjugate(const Quaternion& q) { return q.conjugate(); }

/// <a,b> = -(ab + ba)/2, the Euclidean dot product for pure arguments.
constexpr double quat_inner(const PureQuaternion& a, const PureQuaternion& b) {
  const Quaternion ab = Quaternion(a) * Quaternion(b);
  const Quaternion ba = Quaternion(b) * Quaternion(a);
  return -(ab.w + ba.w) / 2.0;
}

/// a x b = (ab - ba)/2 for pure arguments.
constexpr PureQuaternion quat_cross(const PureQuaternion& a, const PureQuaternion& b) {
  const Quaternion ab = Quaternion(a) * Quaternion(b);
  const Quaternion ba = Quaternion(b) * Quaternion(a);
  return ((ab - ba) / 2.0).vector();
}

/// Rotation of a vector: q p q*. Requires a unit quaternion.
inline PureQuaternion adjoint(const Quaternion& q, const PureQuaternion& p) {
  if (!q.is_unit()) {
    throw NonUnitQuaternion("adjoint requires a unit quaternion, |q|^2 = " +
                            std::to_string(q.norm_squared()));
  }
  return (q * Quaternion(p) * q.conjugate()).vector();
}

/// Unit quaternion cos(angle/2) + axis sin(angle/2).
inline Quaternion axis_angle(const PureQuaternion& axis, double angle) {
  if (!axis.is_unit()) throw NonUnitAxis("rotation axis must have unit norm");
  const double s = std::sin(angle / 2.0);
  return {std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s};
}

}  // namespace dqlimb
