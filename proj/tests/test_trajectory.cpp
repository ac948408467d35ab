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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "test_support.hpp"

namespace dqlimb {
namespace {

using Poly = std::vector<double>;  // coefficients, lowest degree first

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly third_derivative(const Poly& p) {
  Poly out;
  for (std::size_t k = 3; k < p.size(); ++k) {
    out.push_back(p[k] * static_cast<double>(k * (k - 1) * (k - 2)));
  }
  return out.empty() ? Poly{0.0} : out;
}

double integrate_unit(const Poly& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] / static_cast<double>(k + 1);
  return s;
}

/// Exact integral over [0, T] of the squared jerk of x(t) = q(t / T).
double exact_cost(const Poly& q_of_u, double duration) {
  const Poly j = third_derivative(q_of_u);
  return integrate_unit(multiply(j, j)) / std::pow(duration, 5);
}

TEST(Trajectory, ReferenceReachBoundaryConditions) {
  const auto bc = BoundaryConditions::reference_reach();
  EXPECT_EQ(bc.duration, 2.0);
  const auto samples = plan_min_jerk(bc, 500);
  ASSERT_EQ(samples.size(), 500u);
  EXPECT_LT((samples.front().position - Eigen::Vector3d(0.8, -0.06, 0.1)).cwiseAbs().maxCoeff(),
            1e-12);
  EXPECT_LT((samples.back().position - Eigen::Vector3d(0.7, 0.48, 0.08)).cwiseAbs().maxCoeff(),
            1e-12);
  for (const auto* s : {&samples.front(), &samples.back()}) {
    EXPECT_LT(s->velocity.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(s->acceleration.cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(samples.front().t, 0.0);
  EXPECT_EQ(samples.back().t, 2.0);
}

TEST(Trajectory, GeneralBoundaryConditions) {
  testing::Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    BoundaryConditions bc;
    bc.p0 = testing::random_vector(rng);
    bc.p1 = testing::random_vector(rng);
    bc.v0 = testing::random_vector(rng);
    bc.v1 = testing::random_vector(rng);
    bc.a0 = testing::random_vector(rng);
    bc.a1 = testing::random_vector(rng);
    bc.duration = testing::uniform(rng, 0.5, 3.0);
    const QuinticTrajectory q(bc);
    const double t = bc.duration;
    EXPECT_LT((q.position(0) - bc.p0).norm(), 1e-12);
    EXPECT_LT((q.velocity(0) - bc.v0).norm(), 1e-12);
    EXPECT_LT((q.acceleration(0) - bc.a0).norm(), 1e-12);
    EXPECT_LT((q.position(t) - bc.p1).norm(), 1e-11);
    EXPECT_LT((q.velocity(t) - bc.v1).norm(), 1e-11);
    EXPECT_LT((q.acceleration(t) - bc.a1).norm(), 1e-10);
  }
}

TEST(Trajectory, RestToRestMidpointIsTheMean) {
  testing::Rng rng(72);
  for (int i = 0; i < 100; ++i) {
    BoundaryConditions bc;
    bc.p0 = testing::random_vector(rng);
    bc.p1 = testing::random_vector(rng);
    bc.duration = testing::uniform(rng, 0.5, 3.0);
    const QuinticTrajectory q(bc);
    EXPECT_LT((q.position(bc.duration / 2) - (bc.p0 + bc.p1) / 2).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Trajectory, ConstantTrajectory) {
  BoundaryConditions bc;
  bc.p0 = bc.p1 = Eigen::Vector3d(0.3, -0.2, 0.1);
  for (const auto& s : plan_min_jerk(bc, 50)) {
    EXPECT_EQ(s.position, bc.p0);
    EXPECT_EQ(s.jerk, Eigen::Vector3d::Zero());
  }
  EXPECT_EQ(QuinticTrajectory(bc).jerk_cost(), 0.0);
}

TEST(Trajectory, JerkCostClosedForm) {
  // Rest to rest: s(u) = 10u^3 - 15u^4 + 6u^5 and the integral of s'''^2
  // over [0, 1] is 720.
  EXPECT_DOUBLE_EQ(exact_cost({0, 0, 0, 10, -15, 6}, 1.0), 720.0);
  testing::Rng rng(73);
  for (int i = 0; i < 100; ++i) {
    BoundaryConditions bc;
    bc.p0 = testing::random_vector(rng);
    bc.p1 = testing::random_vector(rng);
    bc.duration = testing::uniform(rng, 0.3, 4.0);
    const double expect = 720.0 * (bc.p1 - bc.p0).squaredNorm() / std::pow(bc.duration, 5);
    EXPECT_NEAR(QuinticTrajectory(bc).jerk_cost() / expect, 1.0, 1e-9);
  }
}

TEST(Trajectory, TimeScaling) {
  BoundaryConditions bc = BoundaryConditions::reference_reach(1.3);
  const double a = QuinticTrajectory(bc).jerk_cost();
  bc.duration *= 2;
  const double b = QuinticTrajectory(bc).jerk_cost();
  EXPECT_NEAR(b / a, 1.0 / 32.0, 1e-9 / 32.0);
}

TEST(Trajectory, MinimumJerkIsOptimal) {
  // Perturbations u^3 (1-u)^3 (c0 + c1 u + c2 u^2) keep all boundary
  // conditions; none of them may lower the cost.
  testing::Rng rng(74);
  const BoundaryConditions bc = BoundaryConditions::reference_reach();
  const QuinticTrajectory q(bc);
  for (int axis = 0; axis < 3; ++axis) {
    Poly base(6);
    for (int k = 0; k < 6; ++k) base[k] = q.coefficients()[k](axis) * std::pow(bc.duration, k);
    const double optimum = exact_cost(base, bc.duration);
    const Poly bump = multiply({0, 0, 0, 1}, {1, -3, 3, -1});  // u^3 (1-u)^3
    for (int i = 0; i < 100; ++i) {
      const Poly shape = multiply(bump, {testing::uniform(rng, -1, 1),
                                         testing::uniform(rng, -1, 1),
                                         testing::uniform(rng, -1, 1)});
      Poly perturbed = shape;
      for (std::size_t k = 0; k < base.size(); ++k) perturbed[k] += base[k];
      EXPECT_GT(exact_cost(perturbed, bc.duration), optimum);
    }
  }
}

TEST(Trajectory, JerkEnergyIsExactOnCubics) {
  // x = c t^3 has constant jerk 6c, so the integral is 36 c^2 T.
  for (int n : {4, 5, 7, 100}) {
    const double c = 0.7, duration = 1.5;
    std::vector<double> x;
    for (int k = 0; k < n; ++k) {
      const double t = duration * k / (n - 1);
      x.push_back(c * t * t * t - 0.2 * t * t + 0.1);
    }
    EXPECT_NEAR(jerk_energy(x, duration) / (36 * c * c * duration), 1.0, 1e-6) << n;
    EXPECT_NEAR(jerk_energy(x, duration, 2.5) / jerk_energy(x, duration), 2.5, 1e-12);
  }
}

TEST(Trajectory, JerkEnergyConverges) {
  const BoundaryConditions bc = BoundaryConditions::reference_reach();
  const double exact = QuinticTrajectory(bc).jerk_cost();
  auto energy = [&](int n) {
    double sum = 0.0;
    const auto samples = plan_min_jerk(bc, n);
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<double> x;
      for (const auto& s : samples) x.push_back(s.position(axis));
      sum += jerk_energy(x, bc.duration);
    }
    return sum;
  };
  for (int n : {200, 400, 800}) {
    const double coarse = energy(n), fine = energy(2 * n - 1);
    EXPECT_LT(std::abs(fine - coarse) / fine, 0.01) << n;
    EXPECT_LT(std::abs(fine - exact) / exact, 0.01) << n;
  }
}

TEST(Trajectory, Errors) {
  BoundaryConditions bc;
  bc.duration = 0.0;
  EXPECT_THROW(QuinticTrajectory{bc}, InvalidDuration);
  bc.duration = -1.0;
  EXPECT_THROW(plan_min_jerk(bc, 10), InvalidDuration);
  bc.duration = 1.0;
  EXPECT_THROW(plan_min_jerk(bc, 1), InvalidSampleCount);
  const std::vector<double> three = {0, 1, 2};
  EXPECT_THROW(jerk_energy(three, 1.0), TooFewSamples);
}

TEST(Trajectory, CsvRoundTrip) {
  const auto samples = plan_min_jerk(BoundaryConditions::reference_reach(), 37);
  std::stringstream ss;
  write_trajectory_csv(ss, samples);
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(back[i].t, samples[i].t);
    EXPECT_EQ(back[i].position, samples[i].position);
    EXPECT_EQ(back[i].jerk, samples[i].jerk);
  }
  std::stringstream bad("t,x\n1,2\n");
  EXPECT_THROW(read_trajectory_csv(bad), ParseError);
}

}  // namespace
}  // namespace dqlimb
