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

/// Recursive Newton-Euler inverse dynamics in dual-quaternion form.
///
/// Every link carries a frame c_i at its center of mass, oriented like the
/// link frame. Twists xi = w + eps v and their time derivatives are
/// propagated from the base outwards:
///
///   xi_ci  = Ad(x_{c(i-1)}^{ci}) xi_c(i-1) + Ad(x_i^{ci}) xi_i
///   xi_ci' = Ad(x_{c(i-1)}^{ci}) xi_c(i-1)' + Ad(x_i^{ci}) xi_i'
///            + xi_{ci,c(i-1)} x Ad(x_{c(i-1)}^{ci}) xi_c(i-1)
///
/// where xi_i = theta_dot_i s_i is the joint twist at the joint origin and
/// xi_{ci,c(i-1)} = -Ad(x_i^{ci}) xi_i. Wrenches zeta = f + eps tau are then
/// accumulated from the foot inwards:
///
///   zeta_ci = m (a - g) + eps (chi(I) w' + w x chi(I) w)
///   zeta_i  = Ad(x_ci^i) zeta_ci + Ad(x_{i+1}^i) zeta_{i+1}
///
/// and tau_i = <s_i, torque part of zeta_i>.
///
/// The forward kinematics turns joint i by -theta_i about n_i, so the
/// motion axis of joint i is s_i = -n_i. Projecting on s_i makes tau_i
/// power-conjugate to theta_dot_i, i.e. sum tau_i theta_dot_i is the power
/// delivered by the joints.

#include <array>
#include <cmath>

#include <Eigen/Core>

#include "dqlimb/dual_quaternion.hpp"
#include "dqlimb/error.hpp"
#include "dqlimb/kinematics.hpp"
#include "dqlimb/limb_model.hpp"

namespace dqlimb {

struct LinkKinematicsFrame {
  DualQuaternion com_pose;       // c_i -> base
  DualQuaternion from_previous;  // x_{c(i-1)}^{ci}: c_(i-1) coordinates -> c_i coordinates
  DualQuaternion joint_to_com;   // x_i^{ci}: joint frame i -> c_i
  DualQuaternion to_next_joint;  // x_{i+1}^i: joint frame i+1 -> joint frame i (identity for the foot)
  PureQuaternion motion_axis;    // s_i in joint frame i
  Twist twist;                   // xi_{0,ci}^{ci}
  Twist twist_rate;              // d/dt of the body-frame components
};

struct ForwardRecursion {
  std::array<LinkKinematicsFrame, 3> links;
  Eigen::Matrix<double, 12, 1> geometry;  // model fingerprint for FrameMismatch
};

struct DynamicsResult {
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N m, conjugate to theta_dot
  std::array<Wrench, 3> joint_wrenches;               // zeta_{0,i} in joint frame i
};

namespace detail {

inline Eigen::Matrix<double, 12, 1> geometry_of(const LimbModel& m) {
  Eigen::Matrix<double, 12, 1> g;
  g << m.pelvis.length, m.thigh().length, m.leg().length, m.foot().length, m.thigh().com_offset,
      m.leg().com_offset, m.foot().com_offset.head<2>();
  return g;
}

inline void require_unit_pose(const DualQuaternion& d, const char* what) {
  if (!d.is_unit()) throw NonUnitPose(std::string(what) + " is not a unit dual quaternion");
}

}  // namespace detail

/// Twists of each center-of-mass frame and their derivatives. The base is
/// fixed (zero twist).
inline ForwardRecursion forward_recursion(const LimbModel& model, const JointState& state,
                                          const JointRates& rates, const JointAccels& accels) {
  const ChainFrames chain = chain_frames(model, state);
  const std::array<DualQuaternion, 3> link_pose = {chain.thigh, chain.leg, chain.foot};
  const std::array<PureQuaternion, 3> axes = {-state.n1, -kKneeAxis, -state.n3};

  ForwardRecursion out;
  out.geometry = detail::geometry_of(model);

  DualQuaternion prev_pose = DualQuaternion::identity();
  Twist prev_twist{}, prev_rate{};
  for (std::size_t i = 0; i < 3; ++i) {
    LinkKinematicsFrame& f = out.links[i];
    const PureQuaternion com(model.links[i].com_offset);
    f.com_pose = link_pose[i] * translation_dq(com);
    f.from_previous = f.com_pose.quaternion_conjugate() * prev_pose;
    f.joint_to_com = translation_dq(-com);
    f.to_next_joint = i < 2 ? link_pose[i].quaternion_conjugate() * link_pose[i + 1]
                            : DualQuaternion::identity();
    f.motion_axis = axes[i];
    detail::require_unit_pose(f.from_previous, "x_{c(i-1)}^{ci}");

    const Twist joint_twist{axes[i] * rates(static_cast<Eigen::Index>(i)), {}};
    const Twist joint_accel{axes[i] * accels(static_cast<Eigen::Index>(i)), {}};
    const Twist carried = adjoint(f.from_previous, prev_twist);
    const Twist relative = adjoint(f.joint_to_com, joint_twist);

    f.twist = carried + relative;
    const DualQuaternion cross = dq_cross((relative * -1.0).to_dq(), carried.to_dq());
    f.twist_rate = adjoint(f.from_previous, prev_rate) + adjoint(f.joint_to_com, joint_accel) +
                   Twist::from_dq(cross);

    prev_pose = f.com_pose;
    prev_twist = f.twist;
    prev_rate = f.twist_rate;
  }
  return out;
}

/// Joint wrenches and torques. `foot_load` is the wrench the foot exerts
/// on its surroundings, about the foot's center of mass in its frame; it
/// adds to what the joints must supply. `gravity` is the gravitational
/// acceleration in the base frame.
inline DynamicsResult backward_recursion(const LimbModel& model, const ForwardRecursion& frames,
                                         const Wrench& foot_load, const Eigen::Vector3d& gravity) {
  if (frames.geometry != detail::geometry_of(model)) {
    throw FrameMismatch("forward recursion was computed for a different limb model");
  }
  DynamicsResult out;
  Wrench outer{};  // zeta_{i+1} in joint frame i+1
  for (int i = 2; i >= 0; --i) {
    const LinkKinematicsFrame& f = frames.links[static_cast<std::size_t>(i)];
    const Segment& seg = model.links[static_cast<std::size_t>(i)];
    const PureQuaternion w = f.twist.angular;
    const PureQuaternion v = f.twist.linear;
    const PureQuaternion g_local = adjoint(f.com_pose.primary.conjugate(), PureQuaternion(gravity));
    const PureQuaternion accel = f.twist_rate.linear + quat_cross(w, v);

    Wrench com_wrench;
    com_wrench.force = (accel - g_local) * seg.mass;
    com_wrench.torque = seg.inertia.apply(f.twist_rate.angular) +
                        quat_cross(w, seg.inertia.apply(w));
    if (i == 2) com_wrench = com_wrench + foot_load;

    const Wrench joint = adjoint(f.joint_to_com.quaternion_conjugate(), com_wrench) +
                         adjoint(f.to_next_joint, outer);
    out.joint_wrenches[static_cast<std::size_t>(i)] = joint;
    out.torque(i) = quat_inner(f.motion_axis, joint.torque);
    outer = joint;
  }
  return out;
}

inline DynamicsResult inverse_dynamics(const LimbModel& model, const JointState& state,
                                       const JointRates& rates, const JointAccels& accels,
                                       const Wrench& foot_load = {}) {
  return backward_recursion(model, forward_recursion(model, state, rates, accels), foot_load,
                            model.gravity);
}

inline DynamicsResult inverse_dynamics(const LimbModel& model, const JointState& state,
                                       const JointRates& rates, const JointAccels& accels,
                                       const Wrench& foot_load, const Eigen::Vector3d& gravity) {
  return backward_recursion(model, forward_recursion(model, state, rates, accels), foot_load,
                            gravity);
}

/// tau = M(q) q'' + V(q, q') + G(q), recovered by probing inverse_dynamics.
struct MvgTerms {
  Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // Coriolis and centrifugal
  Eigen::Vector3d gravity = Eigen::Vector3d::Zero();
};

inline MvgTerms extract_mvg(const LimbModel& model, const JointState& state,
                            const JointRates& rates) {
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  MvgTerms t;
  t.gravity = inverse_dynamics(model, state, zero, zero, {}, model.gravity).torque;
  t.velocity = inverse_dynamics(model, state, rates, zero, {}, model.gravity).torque - t.gravity;
  for (int j = 0; j < 3; ++j) {
    t.mass.col(j) =
        inverse_dynamics(model, state, zero, Eigen::Vector3d::Unit(j), {}, zero).torque;
  }
  return t;
}

/// Center-of-mass positions in the base frame.
inline std::array<Eigen::Vector3d, 3> com_positions(const LimbModel& model,
                                                    const JointState& state) {
  const ChainFrames chain = chain_frames(model, state);
  const std::array<DualQuaternion, 3> link_pose = {chain.thigh, chain.leg, chain.foot};
  std::array<Eigen::Vector3d, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = transform_point(link_pose[i], PureQuaternion(model.links[i].com_offset)).to_vector();
  }
  return out;
}

inline double kinetic_energy(const LimbModel& model, const JointState& state,
                             const JointRates& rates) {
  const ForwardRecursion fr = forward_recursion(model, state, rates, Eigen::Vector3d::Zero());
  double ke = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Twist& xi = fr.links[i].twist;
    ke += 0.5 * model.links[i].mass * xi.linear.norm_squared() +
          0.5 * quat_inner(xi.angular, model.links[i].inertia.apply(xi.angular));
  }
  return ke;
}

inline double potential_energy(const LimbModel& model, const JointState& state) {
  const auto coms = com_positions(model, state);
  double pe = 0.0;
  for (std::size_t i = 0; i < 3; ++i) pe -= model.links[i].mass * model.gravity.dot(coms[i]);
  return pe;
}

}  // namespace dqlimb
