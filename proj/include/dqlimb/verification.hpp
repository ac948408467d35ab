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

/// Self-checks run by `dqlimb verify`: the dual-quaternion pipeline against
/// independent references.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dqlimb/dynamics.hpp"
#include "dqlimb/kinematics.hpp"
#include "dqlimb/limb_model.hpp"
#include "dqlimb/reference/classical_rnea.hpp"
#include "dqlimb/reference/homogeneous_fk.hpp"
#include "dqlimb/rom.hpp"

namespace dqlimb {

struct CheckResult {
  std::string name;
  double error = 0.0;      // worst observed discrepancy
  double tolerance = 0.0;
  bool passed() const { return error < tolerance; }
};

/// Dual-quaternion FK vs homogeneous matrices over ROM-valid random states.
inline CheckResult check_fk_against_matrices(const LimbModel& model, int count,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const JointState s = sample_configuration(model, rng);
    worst = std::max(worst, (fk_position(model, s) - reference::end_effector(model, s)).norm());
  }
  return {"fk_vs_matrix", worst, 1e-10};
}

/// Knee-only pendulum: hip locked with the thigh along x, massless foot,
/// gravity in the knee's plane of motion. tau2 = I theta2'' + m g l cos(theta2)
/// with I the leg's inertia about the knee axis.
inline CheckResult check_pendulum(const LimbModel& base, int points) {
  LimbModel model = base;
  model.links[2].mass = 0.0;
  model.links[2].inertia = InertiaOperator::principal(0.0, 0.0, 0.0);
  const double g = 9.81;
  model.gravity = {0.0, g, 0.0};
  const Segment& leg = model.leg();
  const double lc = leg.com_offset.x();
  model.links[1].com_offset = {lc, 0.0, 0.0};
  const double inertia = leg.inertia.to_matrix()(2, 2) + leg.mass * lc * lc;

  double worst = 0.0;
  const AngleRange knee = model.rom[RomConstraint::kKneeFlexionExtension];
  for (int k = 0; k < points; ++k) {
    JointState s;
    s.theta = {0.0, knee.min + (knee.max - knee.min) * k / std::max(1, points - 1), 0.3};
    s.n1 = PureQuaternion::unit_z();
    s.n3 = PureQuaternion(0.0, 0.6, 0.8);
    const double qd = 1.5 * std::sin(0.7 * k), qdd = 2.0 * std::cos(1.3 * k);
    const Eigen::Vector3d tau =
        inverse_dynamics(model, s, {0.0, qd, 0.0}, {0.0, qdd, 0.0}).torque;
    const double expected = inertia * qdd + leg.mass * g * lc * std::cos(s.theta(1));
    worst = std::max(worst, std::abs(tau(1) - expected));
  }
  return {"pendulum", worst, 1e-8};
}

/// Power balance along a prescribed smooth joint trajectory:
/// tau . q' = d/dt (kinetic + potential energy). Reports the worst residual
/// relative to the peak joint power.
inline CheckResult check_power_balance(const LimbModel& model, const JointState& start,
                                       double duration, int points) {
  const Eigen::Vector3d amp(0.4, 0.5, 0.6), freq(2.1, 1.7, 2.9), phase(0.3, 1.1, 2.0);
  auto at = [&](double t, Eigen::Vector3d& q, Eigen::Vector3d& qd, Eigen::Vector3d& qdd) {
    for (int j = 0; j < 3; ++j) {
      q(j) = start.theta(j) + amp(j) * std::sin(freq(j) * t + phase(j));
      qd(j) = amp(j) * freq(j) * std::cos(freq(j) * t + phase(j));
      qdd(j) = -amp(j) * freq(j) * freq(j) * std::sin(freq(j) * t + phase(j));
    }
  };
  auto energy = [&](double t) {
    Eigen::Vector3d q, qd, qdd;
    at(t, q, qd, qdd);
    JointState s = start;
    s.theta = q;
    return kinetic_energy(model, s, qd) + potential_energy(model, s);
  };
  const double h = 1e-4;
  double worst = 0.0, peak = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = duration * k / std::max(1, points - 1);
    Eigen::Vector3d q, qd, qdd;
    at(t, q, qd, qdd);
    JointState s = start;
    s.theta = q;
    const double power = inverse_dynamics(model, s, qd, qdd).torque.dot(qd);
    // fourth-order central difference
    const double de = (-energy(t + 2 * h) + 8 * energy(t + h) - 8 * energy(t - h) +
                       energy(t - 2 * h)) / (12 * h);
    worst = std::max(worst, std::abs(power - de));
    peak = std::max(peak, std::abs(power));
  }
  return {"power_balance", peak > 0.0 ? worst / peak : worst, 1e-6};
}

/// Dual-quaternion RNEA vs the classical rotation-matrix RNEA.
inline CheckResult check_rnea_against_classical(const LimbModel& model, int count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const JointState s = sample_configuration(model, rng);
    const Eigen::Vector3d qd(u(rng), u(rng), u(rng)), qdd(u(rng), u(rng), u(rng));
    const Eigen::Vector3d a = inverse_dynamics(model, s, qd, qdd).torque;
    const Eigen::Vector3d b = reference::inverse_dynamics(model, s, qd, qdd, model.gravity);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  return {"rnea_vs_classical", worst, 1e-9};
}

inline std::vector<CheckResult> run_verification(const LimbModel& model, std::uint64_t seed) {
  JointState start;
  start.theta = {0.4, -0.8, 0.6};
  start.n1 = PureQuaternion(0.3, 0.4, 0.866).normalized();
  start.n3 = PureQuaternion(0.5, -0.5, 0.7).normalized();
  return {check_fk_against_matrices(model, 10'000, seed), check_pendulum(model, 100),
          check_power_balance(model, start, 2.0, 200),
          check_rnea_against_classical(model, 10'000, seed + 1)};
}

}  // namespace dqlimb
