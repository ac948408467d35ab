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

#include "test_support.hpp"

namespace dqlimb {
namespace {

using testing::max_abs_diff;

const Quaternion kOne{1, 0, 0, 0}, kI{0, 1, 0, 0}, kJ{0, 0, 1, 0}, kK{0, 0, 0, 1};

TEST(Quaternion, HamiltonTable) {
  EXPECT_EQ(kI * kJ, kK);
  EXPECT_EQ(kJ * kK, kI);
  EXPECT_EQ(kK * kI, kJ);
  EXPECT_EQ(kJ * kI, -kK);
  EXPECT_EQ(kK * kJ, -kI);
  EXPECT_EQ(kI * kK, -kJ);
  EXPECT_EQ(kI * kI, -kOne);
  EXPECT_EQ(kJ * kJ, -kOne);
  EXPECT_EQ(kK * kK, -kOne);
  EXPECT_EQ(kI * kJ * kK, -kOne);
}

TEST(Quaternion, ProductMatchesExpandedForm) {
  // (1 + 2i + 3j + 4k)(5 + 6i + 7j + 8k), expanded by hand.
  const Quaternion p{1, 2, 3, 4}, q{5, 6, 7, 8};
  EXPECT_EQ(quat_mul(p, q), Quaternion(-60, 12, 30, 24));
  EXPECT_EQ(quat_mul(q, p), Quaternion(-60, 20, 14, 32));
}

TEST(Quaternion, NormIsMultiplicative) {
  testing::Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const Quaternion p = testing::random_quaternion(rng), q = testing::random_quaternion(rng);
    const double expect = p.norm() * q.norm();
    worst = std::max(worst, std::abs((p * q).norm() - expect) / expect);
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Quaternion, ConjugateReversesProducts) {
  testing::Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion p = testing::random_quaternion(rng), q = testing::random_quaternion(rng);
    EXPECT_LT(max_abs_diff(quat_conjugate(p * q), q.conjugate() * p.conjugate()), 1e-12);
    const Quaternion pp = p * p.conjugate();
    EXPECT_NEAR(pp.w, p.norm_squared(), 1e-12);
    EXPECT_NEAR(std::abs(pp.x) + std::abs(pp.y) + std::abs(pp.z), 0.0, 1e-12);
  }
}

TEST(Quaternion, AssociativeAndDistributive) {
  testing::Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion a = testing::random_quaternion(rng), b = testing::random_quaternion(rng),
                     c = testing::random_quaternion(rng);
    EXPECT_LT(max_abs_diff((a * b) * c, a * (b * c)), 1e-12);
    EXPECT_LT(max_abs_diff(a * (b + c), a * b + a * c), 1e-12);
  }
}

TEST(Quaternion, InnerAndCrossOfPureQuaternions) {
  testing::Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    const PureQuaternion a = testing::random_pure(rng), b = testing::random_pure(rng);
    EXPECT_NEAR(quat_inner(a, b), a.to_vector().dot(b.to_vector()), 1e-12);
    EXPECT_LT((quat_cross(a, b).to_vector() - a.to_vector().cross(b.to_vector()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(Quaternion, AdjointRotatesLikeRodrigues) {
  testing::Rng rng(15);
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const PureQuaternion u = testing::random_axis(rng);
    const double angle = testing::uniform(rng, -2 * kPi, 2 * kPi);
    const Quaternion q{std::cos(angle / 2), u.x * std::sin(angle / 2), u.y * std::sin(angle / 2),
                       u.z * std::sin(angle / 2)};
    const PureQuaternion p = testing::random_pure(rng);
    const Eigen::Vector3d expect = testing::rodrigues(u.to_vector(), angle, p.to_vector());
    worst = std::max(worst, (adjoint(q, p).to_vector() - expect).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Quaternion, AdjointPreservesNormAndInverts) {
  testing::Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q = testing::random_unit_quaternion(rng);
    const PureQuaternion p = testing::random_pure(rng);
    const PureQuaternion r = adjoint(q, p);
    EXPECT_NEAR(r.norm(), p.norm(), 1e-12);
    // purity: the scalar part of q p q* vanishes
    EXPECT_NEAR((q * Quaternion(p) * q.conjugate()).w, 0.0, 1e-12);
    EXPECT_LT(max_abs_diff(adjoint(q.conjugate(), r), p), 1e-10);
  }
}

TEST(Quaternion, AdjointQuarterTurnAboutZ) {
  const Quaternion q = axis_angle(PureQuaternion::unit_z(), kPi / 2);
  EXPECT_LT(max_abs_diff(adjoint(q, PureQuaternion::unit_x()), PureQuaternion::unit_y()), 1e-15);
}

TEST(Quaternion, AdjointRejectsNonUnit) {
  EXPECT_THROW(adjoint(Quaternion{2, 0, 0, 0}, PureQuaternion::unit_x()), NonUnitQuaternion);
  EXPECT_THROW(adjoint(Quaternion{0.9, 0, 0, 0}, PureQuaternion::unit_x()), NonUnitQuaternion);
}

TEST(Quaternion, AxisAngle) {
  EXPECT_THROW(axis_angle(PureQuaternion{0.5, 0, 0}, 1.0), NonUnitAxis);
  const Quaternion q = axis_angle(PureQuaternion::unit_x(), kPi);
  EXPECT_LT(max_abs_diff(q, kI), 1e-15);
  EXPECT_TRUE(axis_angle(PureQuaternion(0.6, 0.0, 0.8), 0.3).is_unit());
}

TEST(Quaternion, CheckedRejectsNonFinite) {
  EXPECT_THROW(Quaternion::checked(1, std::nan(""), 0, 0), NonFiniteValue);
  EXPECT_THROW(Quaternion::checked(1, 0, INFINITY, 0), NonFiniteValue);
  EXPECT_NO_THROW(Quaternion::checked(1, 2, 3, 4));
}

}  // namespace
}  // namespace dqlimb
