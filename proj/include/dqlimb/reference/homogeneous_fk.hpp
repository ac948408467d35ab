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

// Homogeneous-matrix forward kinematics of the limb. Shares no code with the
// dual-quaternion path; used to cross-check it.

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dqlimb/limb_model.hpp"

namespace dqlimb::reference {

inline Eigen::Matrix4d rotation(const Eigen::Vector3d& axis, double angle) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  return t;
}

inline Eigen::Matrix4d translation(const Eigen::Vector3d& d) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topRightCorner<3, 1>() = d;
  return t;
}

/// Link-to-base transforms of thigh, leg and foot. Joint i turns the
/// following links by -theta_i about n_i; the ankle carries an extra half
/// turn.
inline std::array<Eigen::Matrix4d, 3> link_transforms(const LimbModel& m, const JointState& s) {
  const Eigen::Matrix4d thigh = translation({0.0, 0.0, m.pelvis.length}) *
                                rotation(s.n1.to_vector(), -s.theta(0));
  const Eigen::Matrix4d leg = thigh * translation({m.thigh().length, 0.0, 0.0}) *
                              rotation(Eigen::Vector3d::UnitZ(), -s.theta(1));
  const Eigen::Matrix4d foot = leg * translation({m.leg().length, 0.0, 0.0}) *
                               rotation(s.n3.to_vector(), -(s.theta(2) + kPi));
  return {thigh, leg, foot};
}

inline Eigen::Vector3d end_effector(const LimbModel& m, const JointState& s) {
  const auto t = link_transforms(m, s);
  return (t[2] * Eigen::Vector4d(m.foot().length, 0.0, 0.0, 1.0)).head<3>();
}

}  // namespace dqlimb::reference
