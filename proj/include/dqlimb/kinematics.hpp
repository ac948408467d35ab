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

/// Forward kinematics of the hip-knee-ankle chain in dual-quaternion form.
///
/// The end effector is
///
///   P_E0 = t01 r1* t12 r2* t23 r3* P_E3 r3 t23 r2 t12 r1 t01
///
/// with r1 = rot(n1, theta1), r2 = rot(z, theta2), r3 = rot(n3, theta3 + pi),
/// offsets t01 = (0,0,L0), t12 = (L1,0,0), t23 = (L2,0,0) and the foot tip
/// P_E3 = (L3,0,0). The right-hand half is the (eps-negating) conjugate of
/// the left-hand half, so the whole expression is D P D* with
/// D = t01 r1* t12 r2* t23 r3*. Note the sandwich turns each joint by
/// -theta_i about n_i, and the ankle's zero is offset by pi about n3.

#include <array>

#include <Eigen/Core>

#include "dqlimb/dual_quaternion.hpp"
#include "dqlimb/limb_model.hpp"

namespace dqlimb {

/// Joint rotations r1, r2, r3 as unit quaternions.
struct JointRotations {
  Quaternion r1;
  Quaternion r2;
  Quaternion r3;
};

inline JointRotations joint_rotations(const JointState& state) {
  state.validate();
  return {axis_angle(state.n1, state.theta(0)), axis_angle(kKneeAxis, state.theta(1)),
          axis_angle(state.n3, state.theta(2) + kPi)};
}

/// Poses (link frame -> base) of each link and the intermediate translations.
struct ChainFrames {
  DualQuaternion t01, t12, t23;
  JointRotations rotations;
  DualQuaternion thigh;  // t01 r1*
  DualQuaternion leg;    // thigh t12 r2*
  DualQuaternion foot;   // leg t23 r3*
  PureQuaternion foot_tip;  // P_E3
};

inline ChainFrames chain_frames(const LimbModel& model, const JointState& state) {
  ChainFrames f;
  f.rotations = joint_rotations(state);
  f.t01 = translation_dq(PureQuaternion::unit_z(), model.pelvis.length);
  f.t12 = translation_dq(PureQuaternion::unit_x(), model.thigh().length);
  f.t23 = translation_dq(PureQuaternion::unit_x(), model.leg().length);
  f.thigh = f.t01 * DualQuaternion(f.rotations.r1.conjugate());
  f.leg = f.thigh * f.t12 * DualQuaternion(f.rotations.r2.conjugate());
  f.foot = f.leg * f.t23 * DualQuaternion(f.rotations.r3.conjugate());
  f.foot_tip = {model.foot().length, 0.0, 0.0};
  return f;
}

struct PoseResult {
  Eigen::Vector3d end_effector;
  std::array<Eigen::Vector3d, 4> chain_points;  // hip, knee, ankle, end effector
};

struct VelocityResult {
  Eigen::Vector3d end_effector_velocity;
};

/// Hip, knee, ankle and end-effector positions in the base frame.
inline std::array<Eigen::Vector3d, 4> chain_points(const LimbModel& model,
                                                   const JointState& state) {
  const ChainFrames f = chain_frames(model, state);
  const PureQuaternion origin{};
  return {transform_point(f.t01, origin).to_vector(),
          transform_point(f.thigh * f.t12, origin).to_vector(),
          transform_point(f.leg * f.t23, origin).to_vector(),
          transform_point(f.foot, f.foot_tip).to_vector()};
}

inline PoseResult fk_pose(const LimbModel& model, const JointState& state) {
  PoseResult r;
  r.chain_points = chain_points(model, state);
  r.end_effector = r.chain_points[3];
  return r;
}

/// End-effector position only; the hot path for dataset generation and IK.
inline Eigen::Vector3d fk_position(const LimbModel& model, const JointState& state) {
  const ChainFrames f = chain_frames(model, state);
  return transform_point(f.foot, f.foot_tip).to_vector();
}

/// Maps a base-frame point into the foot frame: the inverse of the forward
/// point map, using D^-1 = q0* + eps q1*.
inline Eigen::Vector3d to_foot_frame(const LimbModel& model, const JointState& state,
                                     const Eigen::Vector3d& p_base) {
  const ChainFrames f = chain_frames(model, state);
  return transform_point(f.foot.quaternion_conjugate(), PureQuaternion(p_base)).to_vector();
}

/// End-effector velocity from the three commutator terms
///
///   v = 1/2 (P0' W1 - W1 P0')
///     + 1/2 r1* (P1' W2 - W2 P1') r1
///     + 1/2 r1* r2* (P2' W3 - W3 P2') r2 r1
///
/// where W_i = theta_dot_i n_i and P_i' is the foot tip relative to joint i,
/// expressed in the frame just before joint i's rotation.
inline VelocityResult fk_velocity(const LimbModel& model, const JointState& state,
                                  const JointRates& rates) {
  const ChainFrames f = chain_frames(model, state);
  const DualQuaternion r1c(f.rotations.r1.conjugate());
  const DualQuaternion r2c(f.rotations.r2.conjugate());
  const DualQuaternion r3c(f.rotations.r3.conjugate());

  auto commutator = [](const PureQuaternion& p, const PureQuaternion& omega) {
    const DualQuaternion pd = point_dq(p);
    const DualQuaternion od(Quaternion{omega});
    return (pd * od - od * pd) * 0.5;
  };

  const PureQuaternion p2 = transform_point(r3c, f.foot_tip);
  const PureQuaternion p1 = transform_point(r2c * f.t23 * r3c, f.foot_tip);
  const PureQuaternion p0 = transform_point(r1c * f.t12 * r2c * f.t23 * r3c, f.foot_tip);

  const DualQuaternion term1 = commutator(p0, state.n1 * rates(0));
  const DualQuaternion term2 = r1c * commutator(p1, kKneeAxis * rates(1)) * r1c.conjugate();
  const DualQuaternion term3 =
      r1c * r2c * commutator(p2, state.n3 * rates(2)) * (r1c * r2c).conjugate();

  return {point_of(term1 + term2 + term3).to_vector()};
}

}  // namespace dqlimb
