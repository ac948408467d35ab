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

/// Minimum-jerk task-space planning and jerk-energy evaluation.
///
/// Each axis follows the unique quintic meeting position, velocity and
/// acceleration at both ends. For rest-to-rest motion this is
/// p0 + (p1 - p0) s(t/T) with s(u) = 10u^3 - 15u^4 + 6u^5, whose squared
/// jerk integrates to 720 |p1 - p0|^2 / T^5.

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dqlimb/error.hpp"
#include "dqlimb/io.hpp"

namespace dqlimb {

struct BoundaryConditions {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d v0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d v1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d a0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d a1 = Eigen::Vector3d::Zero();
  double duration = 2.0;  // s

  /// Reach used in the reference experiment: rest to rest over `duration`.
  static BoundaryConditions reference_reach(double duration = 2.0) {
    BoundaryConditions bc;
    bc.p0 = {0.8, -0.06, 0.1};
    bc.p1 = {0.7, 0.48, 0.08};
    bc.duration = duration;
    return bc;
  }
};

struct TrajectorySample {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  Eigen::Vector3d jerk = Eigen::Vector3d::Zero();
};

/// x(t) = sum_k c_k t^k, k = 0..5, per axis.
class QuinticTrajectory {
 public:
  explicit QuinticTrajectory(const BoundaryConditions& bc) : duration_(bc.duration) {
    if (!(bc.duration > 0.0) || !std::isfinite(bc.duration)) {
      throw InvalidDuration("trajectory duration must be positive, got " +
                            std::to_string(bc.duration));
    }
    const double t = bc.duration;
    const Eigen::Vector3d dp = bc.p1 - bc.p0;
    c_[0] = bc.p0;
    c_[1] = bc.v0;
    c_[2] = bc.a0 / 2.0;
    c_[3] = (20.0 * dp - (8.0 * bc.v1 + 12.0 * bc.v0) * t - (3.0 * bc.a0 - bc.a1) * t * t) /
            (2.0 * t * t * t);
    c_[4] = (-30.0 * dp + (14.0 * bc.v1 + 16.0 * bc.v0) * t + (3.0 * bc.a0 - 2.0 * bc.a1) * t * t) /
            (2.0 * t * t * t * t);
    c_[5] = (12.0 * dp - 6.0 * (bc.v1 + bc.v0) * t + (bc.a1 - bc.a0) * t * t) /
            (2.0 * t * t * t * t * t);
  }

  double duration() const { return duration_; }
  const std::array<Eigen::Vector3d, 6>& coefficients() const { return c_; }

  Eigen::Vector3d position(double t) const {
    return c_[0] + t * (c_[1] + t * (c_[2] + t * (c_[3] + t * (c_[4] + t * c_[5]))));
  }
  Eigen::Vector3d velocity(double t) const {
    return c_[1] + t * (2.0 * c_[2] + t * (3.0 * c_[3] + t * (4.0 * c_[4] + t * 5.0 * c_[5])));
  }
  Eigen::Vector3d acceleration(double t) const {
    return 2.0 * c_[2] + t * (6.0 * c_[3] + t * (12.0 * c_[4] + t * 20.0 * c_[5]));
  }
  Eigen::Vector3d jerk(double t) const {
    return 6.0 * c_[3] + t * (24.0 * c_[4] + t * 60.0 * c_[5]);
  }

  TrajectorySample sample(double t) const {
    return {t, position(t), velocity(t), acceleration(t), jerk(t)};
  }

  /// Exact integral of |jerk|^2 over [0, T]. The integrand is a quartic, so
  /// three-point Gauss-Legendre is exact.
  double jerk_cost() const {
    static constexpr std::array<double, 3> nodes = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double t = 0.5 * duration_ * (nodes[i] + 1.0);
      sum += weights[i] * jerk(t).squaredNorm();
    }
    return 0.5 * duration_ * sum;
  }

 private:
  double duration_;
  std::array<Eigen::Vector3d, 6> c_;
};

/// Uniformly spaced samples of the minimum-jerk trajectory, endpoints
/// included. Throws InvalidDuration / InvalidSampleCount.
inline std::vector<TrajectorySample> plan_min_jerk(const BoundaryConditions& bc,
                                                   int n_samples) {
  if (n_samples < 2) {
    throw InvalidSampleCount("trajectory needs at least 2 samples, got " +
                             std::to_string(n_samples));
  }
  const QuinticTrajectory traj(bc);
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  const double step = bc.duration / (n_samples - 1);
  for (int k = 0; k < n_samples; ++k) {
    const double t = (k == n_samples - 1) ? bc.duration : k * step;
    out.push_back(traj.sample(t));
  }
  return out;
}

/// Integral over [0, T] of the squared third derivative of a uniformly
/// sampled scalar signal, times `scale`. Jerk comes from finite differences
/// (five-point central stencil inside, four-point one-sided stencils at the
/// two ends of each side), integrated by the composite trapezoid rule.
/// Stencils are exact on cubics. Needs at least 4 samples for a third
/// difference; throws TooFewSamples otherwise.
inline double jerk_energy(std::span<const double> signal, double duration, double scale = 1.0) {
  const std::size_t n = signal.size();
  if (n < 4) {
    throw TooFewSamples("jerk_energy needs at least 4 samples, got " + std::to_string(n));
  }
  if (!(duration > 0.0)) throw InvalidDuration("jerk_energy duration must be positive");
  const double h = duration / static_cast<double>(n - 1);
  const double h3 = h * h * h;
  std::vector<double> jerk(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      jerk[i] = (-signal[i - 2] + 2.0 * signal[i - 1] - 2.0 * signal[i + 1] + signal[i + 2]) /
                (2.0 * h3);
    } else {
      const std::size_t j = (i < n / 2) ? std::min(i, n - 4) : (i >= 3 ? i - 3 : 0);
      jerk[i] = (signal[j + 3] - 3.0 * signal[j + 2] + 3.0 * signal[j + 1] - signal[j]) / h3;
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sum += 0.5 * h * (jerk[i] * jerk[i] + jerk[i + 1] * jerk[i + 1]);
  }
  return scale * sum;
}

inline constexpr std::string_view kTrajectoryCsvHeader = "t,x,y,z,vx,vy,vz,ax,ay,az,jx,jy,jz";

inline void write_trajectory_csv(std::ostream& out, std::span<const TrajectorySample> samples) {
  out << kTrajectoryCsvHeader << '\n';
  for (const TrajectorySample& s : samples) {
    out << io::format_double(s.t);
    for (const Eigen::Vector3d* v : {&s.position, &s.velocity, &s.acceleration, &s.jerk}) {
      for (int i = 0; i < 3; ++i) out << ',' << io::format_double((*v)(i));
    }
    out << '\n';
  }
}

inline std::vector<TrajectorySample> read_trajectory_csv(std::istream& in) {
  std::vector<TrajectorySample> out;
  for (const auto& r : io::read_csv_table(in, kTrajectoryCsvHeader, "trajectory")) {
    out.push_back({r[0], {r[1], r[2], r[3]}, {r[4], r[5], r[6]}, {r[7], r[8], r[9]},
                   {r[10], r[11], r[12]}});
  }
  if (out.size() < 2) throw TooFewSamples("trajectory file needs at least 2 samples");
  return out;
}

}  // namespace dqlimb
