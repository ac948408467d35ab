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

/// Range-of-motion checks and ROM-constrained configuration sampling.
///
/// The knee row is checked directly on theta2. The hip rows constrain the
/// thigh direction d = (knee - hip)/|knee - hip| and the ankle rows the foot
/// direction d = (tip - ankle)/|tip - ankle|, as signed angles measured from
/// the segment's rest direction u (thigh: +x0, foot: -x0, its direction at
/// the zero configuration) with lateral reference w = z0 x u:
///
///   flexion-type   (x0 row): sign(d.w) * acos(d.u)
///   abduction-type (z0 row): pi/2 - acos(d.z0)
///   rotation-type  (y0 row): pi/2 - acos(d.w)
///
/// A direction has two degrees of freedom, so the rotation-type row cannot
/// see axial twist about the segment; it additionally bounds the sagittal
/// swing through d.w.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "dqlimb/error.hpp"
#include "dqlimb/kinematics.hpp"
#include "dqlimb/limb_model.hpp"

namespace dqlimb {

struct RomCheck {
  RomConstraint constraint;
  double value = 0.0;  // rad
  bool ok = false;
};

struct RomReport {
  std::array<RomCheck, kRomConstraintCount> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const RomCheck& c) { return c.ok; });
  }
  explicit operator bool() const { return ok(); }

  /// Comma-separated names of the violated rows, empty when ok().
  std::string violations() const {
    std::string out;
    for (const RomCheck& c : checks) {
      if (c.ok) continue;
      if (!out.empty()) out += ", ";
      out += kRomConstraintNames[static_cast<int>(c.constraint)];
    }
    return out;
  }
};

namespace detail {

struct SegmentAngles {
  double flexion;
  double abduction;
  double rotation;
};

inline double clamped_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

inline SegmentAngles segment_angles(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                                    const Eigen::Vector3d& rest) {
  const Eigen::Vector3d z0 = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d d = to - from;
  const double n = d.norm();
  if (n == 0.0) return {0.0, 0.0, 0.0};
  d /= n;
  const Eigen::Vector3d lateral = z0.cross(rest);
  const double sign = d.dot(lateral) < 0.0 ? -1.0 : 1.0;
  return {sign * clamped_acos(d.dot(rest)), kPi / 2.0 - clamped_acos(d.dot(z0)),
          kPi / 2.0 - clamped_acos(d.dot(lateral))};
}

}  // namespace detail

/// Evaluates the seven range-of-motion rows. Throws NonUnitAxis.
inline RomReport within_rom(const LimbModel& model, const JointState& state) {
  state.validate();
  const auto pts = chain_points(model, state);
  const detail::SegmentAngles hip =
      detail::segment_angles(pts[0], pts[1], Eigen::Vector3d::UnitX());
  const detail::SegmentAngles ankle =
      detail::segment_angles(pts[2], pts[3], -Eigen::Vector3d::UnitX());
  const std::array<double, kRomConstraintCount> values = {
      hip.flexion,   hip.abduction,   hip.rotation, state.theta(1),
      ankle.flexion, ankle.abduction, ankle.rotation};
  RomReport report;
  for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
    report.checks[i] = {static_cast<RomConstraint>(i), values[i],
                        model.rom.ranges[i].contains(values[i])};
  }
  return report;
}

/// Uniform direction on the unit sphere.
template <class Rng>
PureQuaternion sample_unit_axis(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const PureQuaternion v{normal(rng), normal(rng), normal(rng)};
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

inline constexpr int kMaxConsecutiveRejections = 10'000;

/// Draws a ROM-valid state from `rng`. Since (theta, n) and (-theta, -n)
/// give the same rotation, theta1 and theta3 are drawn from [0, pi]; theta2
/// from the knee range. Throws SamplingExhausted after 10,000 consecutive
/// rejections.
template <class Rng>
JointState sample_configuration(const LimbModel& model, Rng& rng) {
  const AngleRange& knee = model.rom[RomConstraint::kKneeFlexionExtension];
  std::uniform_real_distribution<double> half_turn(0.0, kPi);
  std::uniform_real_distribution<double> knee_angle(knee.min, knee.max);
  for (int attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
    JointState s;
    s.theta = {half_turn(rng), knee_angle(rng), half_turn(rng)};
    s.n1 = sample_unit_axis(rng);
    s.n3 = sample_unit_axis(rng);
    if (within_rom(model, s)) return s;
  }
  throw SamplingExhausted("no ROM-valid configuration after " +
                          std::to_string(kMaxConsecutiveRejections) +
                          " consecutive draws; check the rom section of the limb config");
}

/// Deterministic per seed.
inline JointState sample_configuration(const LimbModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_configuration(model, rng);
}

}  // namespace dqlimb
