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

/// Inverse kinematics of the limb: ROM-constrained training data from the
/// forward model, network inference with axis renormalization, local
/// damped-least-squares refinement, and task-space RMSE evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "dqlimb/error.hpp"
#include "dqlimb/io.hpp"
#include "dqlimb/kinematics.hpp"
#include "dqlimb/limb_model.hpp"
#include "dqlimb/mlp.hpp"
#include "dqlimb/rom.hpp"
#include "dqlimb/trajectory.hpp"

namespace dqlimb {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector9d = Eigen::Matrix<double, 9, 1>;

/// input = (x, y, z, vx, vy, vz) of the foot tip; target = packed JointState.
struct IkSample {
  Vector6d input;
  Vector9d target;
};

struct DatasetOptions {
  double max_rate = 1.0;  // joint rates drawn uniformly from [-max_rate, max_rate] rad/s
  unsigned workers = 1;
};

namespace detail {

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Sample `index` of the dataset with the given seed. Each sample owns its
/// generator, so datasets do not depend on how work is split.
inline IkSample generate_sample(const LimbModel& model, std::uint64_t seed, std::uint64_t index,
                                const DatasetOptions& opt = {}) {
  std::mt19937_64 rng = detail::sample_rng(seed, index);
  const JointState state = sample_configuration(model, rng);
  std::uniform_real_distribution<double> rate(-opt.max_rate, opt.max_rate);
  JointRates rates;
  rates << rate(rng), rate(rng), rate(rng);
  IkSample s;
  s.input << fk_position(model, state), fk_velocity(model, state, rates).end_effector_velocity;
  s.target = state.pack();
  return s;
}

/// Samples [first, first + count). Throws SamplingExhausted.
inline std::vector<IkSample> generate_dataset(const LimbModel& model, std::size_t count,
                                              std::uint64_t seed, const DatasetOptions& opt = {},
                                              std::uint64_t first = 0) {
  if (count == 0) throw InvalidSampleCount("dataset size must be at least 1");
  std::vector<IkSample> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = generate_sample(model, seed, first + i, opt);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) {
          out[i] = generate_sample(model, seed, first + i, opt);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline constexpr std::string_view kDatasetCsvHeader =
    "xd,yd,zd,vxd,vyd,vzd,theta1,theta2,theta3,n1x,n1y,n1z,n3x,n3y,n3z";

inline void write_dataset_rows(std::ostream& out, std::span<const IkSample> samples) {
  for (const IkSample& s : samples) {
    for (int i = 0; i < 6; ++i) out << io::format_double(s.input(i)) << ',';
    for (int i = 0; i < 9; ++i) out << io::format_double(s.target(i)) << (i == 8 ? '\n' : ',');
  }
}

/// Generates and writes `count` samples in blocks, never holding more than
/// one block in memory.
inline void stream_dataset_csv(std::ostream& out, const LimbModel& model, std::size_t count,
                               std::uint64_t seed, const DatasetOptions& opt = {},
                               std::size_t block = 10'000) {
  out << kDatasetCsvHeader << '\n';
  for (std::size_t first = 0; first < count; first += block) {
    const auto rows = generate_dataset(model, std::min(block, count - first), seed, opt, first);
    write_dataset_rows(out, rows);
  }
}

struct DatasetMatrices {
  Eigen::MatrixXd inputs;   // n x 6
  Eigen::MatrixXd targets;  // n x 9
};

inline DatasetMatrices to_matrices(std::span<const IkSample> samples) {
  DatasetMatrices m{Eigen::MatrixXd(static_cast<Eigen::Index>(samples.size()), 6),
                    Eigen::MatrixXd(static_cast<Eigen::Index>(samples.size()), 9)};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m.inputs.row(static_cast<Eigen::Index>(i)) = samples[i].input.transpose();
    m.targets.row(static_cast<Eigen::Index>(i)) = samples[i].target.transpose();
  }
  return m;
}

inline DatasetMatrices read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetCsvHeader) throw ParseError("dataset: unexpected header '" + line + "'");
  std::vector<IkSample> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split(line);
    if (fields.size() != 15) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": expected 15 fields");
    }
    IkSample s;
    const std::string where = "dataset line " + std::to_string(line_no);
    for (int i = 0; i < 6; ++i) s.input(i) = io::parse_double(fields[i], where);
    for (int i = 0; i < 9; ++i) s.target(i) = io::parse_double(fields[6 + i], where);
    rows.push_back(s);
  }
  if (rows.empty()) throw EmptyDataset("dataset has no rows");
  return to_matrices(rows);
}

// Inference ------------------------------------------------------------------

struct IkPrediction {
  Vector9d raw;      // network output as produced
  JointState state;  // axes renormalized to unit length
};

namespace detail {

inline PureQuaternion unit_or_z(double x, double y, double z) {
  const PureQuaternion v{x, y, z};
  const double n = v.norm();
  return n > 1e-12 ? v / n : PureQuaternion::unit_z();
}

inline IkPrediction to_prediction(const Vector9d& raw) {
  IkPrediction p{raw, {}};
  p.state.theta = raw.head<3>();
  p.state.n1 = unit_or_z(raw(3), raw(4), raw(5));
  p.state.n3 = unit_or_z(raw(6), raw(7), raw(8));
  return p;
}

}  // namespace detail

inline IkPrediction ik_infer(const MlpModel& mlp, const Eigen::Vector3d& position,
                             const Eigen::Vector3d& velocity) {
  Vector6d x;
  x << position, velocity;
  const Vector9d raw = mlp.predict_one(x);
  return detail::to_prediction(raw);
}

/// Batch inference over a sampled trajectory.
inline std::vector<IkPrediction> ik_infer_batch(const MlpModel& mlp,
                                                std::span<const TrajectorySample> samples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), 6);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) << samples[i].position.transpose(),
        samples[i].velocity.transpose();
  }
  const Eigen::MatrixXd y = mlp.predict(x);
  std::vector<IkPrediction> out;
  out.reserve(samples.size());
  for (Eigen::Index i = 0; i < y.rows(); ++i) out.push_back(detail::to_prediction(y.row(i).transpose()));
  return out;
}

// Refinement -----------------------------------------------------------------

struct RefineOptions {
  double tolerance = 1e-10;  // m, on |fk(state) - target|
  int max_iterations = 200;
  double fd_step = 1e-6;
  int restarts = 20;  // evaluate_rmse_refined: sampled starts for stubborn samples
};

struct RefineResult {
  JointState state;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;  // residual below tolerance and inside the ROM
};

namespace detail {

using RefineResidual = Eigen::Matrix<double, 3 + kRomConstraintCount, 1>;

inline constexpr double kRomMargin = 1e-6;  // rad, keeps penalized solutions strictly inside

/// Foot-tip error followed by the weighted ROM violation of each row.
inline RefineResidual refine_residual(const LimbModel& model, const JointState& s,
                                      const Eigen::Vector3d& target, double weight) {
  RefineResidual r;
  r.head<3>() = fk_position(model, s) - target;
  const RomReport rom = within_rom(model, s);
  for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
    const double v = rom.checks[i].value;
    const double lo = model.rom.ranges[i].min + kRomMargin;
    const double hi = model.rom.ranges[i].max - kRomMargin;
    r(3 + static_cast<Eigen::Index>(i)) = weight * (v < lo ? v - lo : (v > hi ? v - hi : 0.0));
  }
  return r;
}

}  // namespace detail

/// Damped least squares over the nine parameters (theta, n1, n3) with a
/// central-difference Jacobian. The residual is the foot-tip error plus a
/// hinge penalty on each range-of-motion row, so iterates slide along ROM
/// walls instead of stopping at them. Axes are projected back to the unit
/// sphere and theta2 clamped to the knee range after every step. A run that
/// ends outside the ROM is resumed with a 100x heavier penalty, up to three
/// times. Returns the best iterate: ROM-valid beats invalid, then the lower
/// foot-tip residual wins.
inline RefineResult ik_refine(const LimbModel& model, const JointState& initial,
                              const Eigen::Vector3d& target, const RefineOptions& opt = {}) {
  initial.validate();
  const AngleRange knee = model.rom[RomConstraint::kKneeFlexionExtension];

  auto project = [&](const Vector9d& v) {
    JointState s;
    s.theta = v.head<3>();
    s.theta(1) = std::clamp(s.theta(1), knee.min, knee.max);
    s.n1 = detail::unit_or_z(v(3), v(4), v(5));
    s.n3 = detail::unit_or_z(v(6), v(7), v(8));
    return s;
  };

  RefineResult best;
  bool best_in_rom = false;
  auto offer = [&](const JointState& s, double residual, int it) {
    const bool in_rom = within_rom(model, s).ok();
    if (it == 0 || (in_rom && !best_in_rom) ||
        (in_rom == best_in_rom && residual < best.residual)) {
      best = {s, residual, it, in_rom && residual < opt.tolerance};
      best_in_rom = in_rom;
    }
  };

  JointState current = project(initial.pack());
  double weight = 0.5;
  detail::RefineResidual r = detail::refine_residual(model, current, target, weight);
  offer(current, r.head<3>().norm(), 0);

  int it = 0;
  for (int round = 0; round < 4 && !best.converged; ++round) {
    if (round > 0) {
      if (best_in_rom) break;
      weight *= 100.0;
      r = detail::refine_residual(model, current, target, weight);
    }
    double mu = 1e-3;
    for (; it < opt.max_iterations && !best.converged; ++it) {
      const Vector9d x = current.pack();
      Eigen::Matrix<double, 3 + kRomConstraintCount, 9> jac;
      for (int k = 0; k < 9; ++k) {
        Vector9d xp = x, xm = x;
        xp(k) += opt.fd_step;
        xm(k) -= opt.fd_step;
        jac.col(k) = (detail::refine_residual(model, project(xp), target, weight) -
                      detail::refine_residual(model, project(xm), target, weight)) /
                     (2.0 * opt.fd_step);
      }
      bool accepted = false;
      for (int tries = 0; tries < 30 && !accepted; ++tries) {
        Eigen::Matrix<double, 9, 9> a = jac.transpose() * jac;
        a.diagonal().array() += mu * mu;
        const Vector9d step = -a.ldlt().solve(jac.transpose() * r);
        const JointState trial = project(x + step);
        const detail::RefineResidual rt = detail::refine_residual(model, trial, target, weight);
        if (rt.norm() < r.norm()) {
          current = trial;
          r = rt;
          mu = std::max(mu / 10.0, 1e-12);
          accepted = true;
        } else {
          mu *= 10.0;
        }
      }
      if (!accepted) break;
      offer(current, r.head<3>().norm(), it + 1);
    }
  }
  best.iterations = it;
  return best;
}

// Evaluation -----------------------------------------------------------------

struct RmseReport {
  Eigen::Vector3d rmse = Eigen::Vector3d::Zero();  // per axis, m
  std::vector<Eigen::Vector3d> errors;             // desired - achieved, per sample
  std::vector<JointState> solutions;
};

/// Task-space RMSE of an inverse map along a trajectory: for each sample the
/// inverse proposes a state, the forward model places the foot tip, and the
/// per-axis error is desired - achieved. `inverse` is called as
/// inverse(sample_index, sample) -> JointState.
template <class Inverse>
RmseReport evaluate_rmse(const LimbModel& limb, std::span<const TrajectorySample> samples,
                         Inverse&& inverse) {
  RmseReport rep;
  rep.errors.reserve(samples.size());
  rep.solutions.reserve(samples.size());
  Eigen::Vector3d sq = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const JointState s = inverse(i, samples[i]);
    const Eigen::Vector3d e = samples[i].position - fk_position(limb, s);
    sq += e.cwiseProduct(e);
    rep.errors.push_back(e);
    rep.solutions.push_back(s);
  }
  if (!samples.empty()) rep.rmse = (sq / static_cast<double>(samples.size())).cwiseSqrt();
  return rep;
}

/// RMSE of the network alone.
inline RmseReport evaluate_rmse(const MlpModel& mlp, const LimbModel& limb,
                                std::span<const TrajectorySample> samples) {
  const auto predictions = ik_infer_batch(mlp, samples);
  return evaluate_rmse(limb, samples, [&](std::size_t i, const TrajectorySample&) {
    return predictions[i].state;
  });
}

/// Network output refined by ik_refine. The solution set of a sample is a
/// manifold, and a start can slide along it into a ROM wall and stall there.
/// Samples without a converged ROM-valid solution from the network's guess
/// are retried from the previous sample's solution, then from the next one's
/// in a backward sweep, then from `opt.restarts` ROM-valid configurations
/// drawn with fixed seeds. ROM-valid results beat invalid ones, then the
/// lower residual wins. Deterministic.
inline RmseReport evaluate_rmse_refined(const MlpModel& mlp, const LimbModel& limb,
                                        std::span<const TrajectorySample> samples,
                                        const RefineOptions& opt = {}) {
  const auto predictions = ik_infer_batch(mlp, samples);
  const std::size_t n = samples.size();
  std::vector<RefineResult> refined(n);
  std::vector<char> in_rom(n, 0);
  auto done = [&](std::size_t i) { return refined[i].converged && in_rom[i]; };
  auto retry = [&](std::size_t i, const JointState& start) {
    const RefineResult r = ik_refine(limb, start, samples[i].position, opt);
    const bool valid = within_rom(limb, r.state).ok();
    if (valid > static_cast<bool>(in_rom[i]) ||
        (valid == static_cast<bool>(in_rom[i]) && r.residual < refined[i].residual)) {
      refined[i] = r;
      in_rom[i] = valid;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    refined[i].residual = std::numeric_limits<double>::infinity();
    retry(i, predictions[i].state);
    if (!done(i) && i > 0) retry(i, refined[i - 1].state);
  }
  for (std::size_t i = n; i-- > 1;) {
    if (!done(i - 1)) retry(i - 1, refined[i].state);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < opt.restarts && !done(i); ++k) {
      retry(i, sample_configuration(limb, static_cast<std::uint64_t>(k + 1)));
    }
  }
  return evaluate_rmse(limb, samples, [&](std::size_t i, const TrajectorySample&) {
    return refined[i].state;
  });
}

inline void write_error_csv(std::ostream& out, std::span<const TrajectorySample> samples,
                            const RmseReport& rep) {
  out << "t,ex,ey,ez\n";
  for (std::size_t i = 0; i < samples.size() && i < rep.errors.size(); ++i) {
    out << io::format_double(samples[i].t);
    for (int k = 0; k < 3; ++k) out << ',' << io::format_double(rep.errors[i](k));
    out << '\n';
  }
}

inline constexpr std::string_view kJointCsvHeader =
    "t,theta1,theta2,theta3,n1x,n1y,n1z,n3x,n3y,n3z";

inline void write_joint_csv(std::ostream& out, std::span<const TrajectorySample> samples,
                            std::span<const JointState> states) {
  out << kJointCsvHeader << '\n';
  for (std::size_t i = 0; i < samples.size() && i < states.size(); ++i) {
    out << io::format_double(samples[i].t);
    const Vector9d v = states[i].pack();
    for (int k = 0; k < 9; ++k) out << ',' << io::format_double(v(k));
    out << '\n';
  }
}

struct JointSeries {
  std::vector<double> t;
  std::vector<JointState> states;
};

/// Reads a joint CSV. Axes are validated (NonUnitAxis) as in JointState.
inline JointSeries read_joint_csv(std::istream& in) {
  JointSeries out;
  for (const auto& r : io::read_csv_table(in, kJointCsvHeader, "joints")) {
    Vector9d v;
    for (int k = 0; k < 9; ++k) v(k) = r[static_cast<std::size_t>(k) + 1];
    JointState s = JointState::unpack(v);
    s.validate();
    out.t.push_back(r[0]);
    out.states.push_back(s);
  }
  return out;
}

}  // namespace dqlimb
