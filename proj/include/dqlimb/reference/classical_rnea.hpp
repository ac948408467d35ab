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

// Classical Newton-Euler inverse dynamics with rotation matrices, every
// quantity in the base frame. Independent of the dual-quaternion recursion
// and used to cross-check it.

#include <array>

#include <Eigen/Core>

#include "dqlimb/limb_model.hpp"
#include "dqlimb/reference/homogeneous_fk.hpp"

namespace dqlimb::reference {

/// External load: force and torque (about the foot's center of mass) that
/// the foot exerts on its surroundings, in the base frame.
struct WorldLoad {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

inline Eigen::Vector3d inverse_dynamics(const LimbModel& m, const JointState& s,
                                        const Eigen::Vector3d& qd, const Eigen::Vector3d& qdd,
                                        const Eigen::Vector3d& gravity, const WorldLoad& load = {}) {
  const auto tf = link_transforms(m, s);
  std::array<Eigen::Matrix3d, 3> rot;
  std::array<Eigen::Vector3d, 3> origin, com, axis;
  const std::array<Eigen::Vector3d, 3> local_axis = {-s.n1.to_vector(), -Eigen::Vector3d::UnitZ(),
                                                     -s.n3.to_vector()};
  for (int i = 0; i < 3; ++i) {
    rot[i] = tf[i].topLeftCorner<3, 3>();
    origin[i] = tf[i].topRightCorner<3, 1>();
    com[i] = origin[i] + rot[i] * m.links[i].com_offset;
    axis[i] = rot[i] * local_axis[i];
  }

  // Outward: angular velocity/acceleration, joint-origin and com accelerations.
  std::array<Eigen::Vector3d, 3> w, dw, acc_com;
  Eigen::Vector3d w_prev = Eigen::Vector3d::Zero(), dw_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d acc_origin = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    if (i > 0) {
      const Eigen::Vector3d r = origin[i] - origin[i - 1];
      acc_origin = acc_origin + dw_prev.cross(r) + w_prev.cross(w_prev.cross(r));
    }
    w[i] = w_prev + qd(i) * axis[i];
    dw[i] = dw_prev + qdd(i) * axis[i] + w_prev.cross(qd(i) * axis[i]);
    const Eigen::Vector3d rc = com[i] - origin[i];
    acc_com[i] = acc_origin + dw[i].cross(rc) + w[i].cross(w[i].cross(rc));
    w_prev = w[i];
    dw_prev = dw[i];
  }

  // Inward: forces and moments about each joint origin.
  Eigen::Vector3d tau;
  Eigen::Vector3d f_next = Eigen::Vector3d::Zero(), n_next = Eigen::Vector3d::Zero();
  for (int i = 2; i >= 0; --i) {
    const Eigen::Matrix3d inertia = rot[i] * m.links[i].inertia.to_matrix() * rot[i].transpose();
    Eigen::Vector3d f = m.links[i].mass * (acc_com[i] - gravity);
    Eigen::Vector3d n = inertia * dw[i] + w[i].cross(inertia * w[i]);
    if (i == 2) {
      f += load.force;
      n += load.torque;
    }
    const Eigen::Vector3d rc = com[i] - origin[i];
    Eigen::Vector3d moment = n + rc.cross(f);
    Eigen::Vector3d force = f;
    if (i < 2) {
      moment += n_next + (origin[i + 1] - origin[i]).cross(f_next);
      force += f_next;
    }
    tau(i) = axis[i].dot(moment);
    f_next = force;
    n_next = moment;
  }
  return tau;
}

}  // namespace dqlimb::reference
