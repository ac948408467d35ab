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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "cli.hpp"
#include "dqlimb/dqlimb.hpp"
#include "dqlimb/reference/classical_rnea.hpp"
#include "dqlimb/reference/homogeneous_fk.hpp"

namespace {

using namespace dqlimb;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " | "
            << o.detail << std::endl;
}

std::vector<JointState> rom_states(const LimbModel& m, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<JointState> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample_configuration(m, rng));
  return out;
}

Outcome fk_equivalence(const LimbModel& m) {
  const auto states = rom_states(m, 100'000, 1001);
  const auto start = Clock::now();
  double worst = 0.0;
  for (const JointState& s : states) {
    worst = std::max(worst, (fk_position(m, s) - reference::end_effector(m, s)).norm());
  }
  const double t = seconds_since(start);
  return {worst < 1e-10 && t < 10.0, "max |dp| = " + num(worst) + " m (< 1e-10) over 1e5 " +
                                         "ROM-valid states in " + num(t) + " s (< 10 s)"};
}

Outcome velocity(const LimbModel& m) {
  const auto states = rom_states(m, 10'000, 1002);
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (const JointState& s : states) {
    const JointRates rates(u(rng), u(rng), u(rng));
    JointState plus = s, minus = s;
    plus.theta += rates * h;
    minus.theta -= rates * h;
    const Eigen::Vector3d fd = (fk_position(m, plus) - fk_position(m, minus)) / (2 * h);
    worst = std::max(worst,
                     (fk_velocity(m, s, rates).end_effector_velocity - fd).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-5, "max |dv| = " + num(worst) + " m/s (< 1e-5) over 1e4 states/rates"};
}

Outcome min_jerk() {
  const BoundaryConditions bc = BoundaryConditions::reference_reach(2.0);
  const auto samples = plan_min_jerk(bc, 500);
  double boundary = (samples.front().position - Eigen::Vector3d(0.8, -0.06, 0.1))
                        .cwiseAbs()
                        .maxCoeff();
  boundary = std::max(boundary, (samples.back().position - Eigen::Vector3d(0.7, 0.48, 0.08))
                                    .cwiseAbs()
                                    .maxCoeff());
  for (const auto* s : {&samples.front(), &samples.back()}) {
    boundary = std::max({boundary, s->velocity.cwiseAbs().maxCoeff(),
                         s->acceleration.cwiseAbs().maxCoeff()});
  }
  const QuinticTrajectory q(bc);
  const double mid = (q.position(1.0) - (bc.p0 + bc.p1) / 2).cwiseAbs().maxCoeff();
  // closed form for rest-to-rest motion: 720 |p1 - p0|^2 / T^5
  const double closed = 720.0 * (bc.p1 - bc.p0).squaredNorm() / std::pow(bc.duration, 5);
  const double rel = std::abs(q.jerk_cost() - closed) / closed;
  return {boundary < 1e-12 && mid < 1e-12 && rel < 1e-9,
          "boundary err " + num(boundary) + " (< 1e-12), midpoint err " + num(mid) +
              " (< 1e-12), jerk integral rel err " + num(rel) + " (< 1e-9), T = 2 s"};
}

struct PipelineRun {
  std::filesystem::path dir;
  int code = -1;
  std::string err;
};

PipelineRun run_pipeline() {
  PipelineRun run;
  run.dir = std::filesystem::absolute("acceptance_artifacts");
  std::filesystem::remove_all(run.dir);
  std::ostringstream out, err;
  run.code = cli::run_command({"pipeline", "--out", run.dir.string(), "--dataset-size", "50000",
                               "--seed", "42", "--samples", "500", "--duration", "2"},
                              out, err);
  run.err = err.str();
  return run;
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

Outcome ik_desk_scale(const LimbModel& m, const PipelineRun& run) {
  if (run.code != 0) return {false, "pipeline failed (exit " + std::to_string(run.code) + ")"};
  const nlohmann::json train = read_json(run.dir / "train.json");
  const MlpModel mlp = load_mlp_file((run.dir / "model.json").string());
  const bool arch = mlp.inputs() == 6 && mlp.hidden() == 20 && mlp.outputs() == 9;
  const auto samples = plan_min_jerk(BoundaryConditions::reference_reach(2.0), 500);
  const RmseReport rep = evaluate_rmse(mlp, m, samples);

  double infer = 1e9;
  for (int k = 0; k < 5; ++k) {
    const auto start = Clock::now();
    const auto predictions = ik_infer_batch(mlp, samples);
    infer = std::min(infer, seconds_since(start));
    if (predictions.size() != samples.size()) return {false, "inference size mismatch"};
  }
  const double train_s = train["wall_seconds"].get<double>();
  const bool pass = arch && train["samples"].get<int>() >= 50'000 && rep.rmse.maxCoeff() <= 0.15 &&
                    train_s <= 1800.0 && infer < 0.1;
  return {pass, "RMSE (" + num(rep.rmse.x()) + ", " + num(rep.rmse.y()) + ", " +
                    num(rep.rmse.z()) + ") m (each <= 0.15), " +
                    std::to_string(train["samples"].get<int>()) + " samples, " +
                    std::to_string(train["epochs"].get<int>()) + " epochs, training " +
                    num(train_s) + " s (<= 1800 s), 500-sample inference " + num(infer) +
                    " s (< 0.1 s)"};
}

/// Foot-tip trajectory produced by a smooth ROM-valid joint motion, so every
/// sample is reachable by construction.
std::vector<TrajectorySample> reachable_trajectory(const LimbModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.35, 0.35);
  const double duration = 2.0;
  for (;;) {
    const JointState a = sample_configuration(m, rng);
    JointState b = a;
    b.theta += Eigen::Vector3d(u(rng), u(rng), u(rng));
    if ((fk_position(m, a) - fk_position(m, b)).norm() < 0.15) continue;
    BoundaryConditions bc;
    bc.p0 = a.theta;
    bc.p1 = b.theta;
    bc.duration = duration;
    const auto joint_path = plan_min_jerk(bc, 500);
    std::vector<TrajectorySample> out;
    bool valid = true;
    for (const auto& js : joint_path) {
      JointState s = a;
      s.theta = js.position;
      if (!within_rom(m, s)) {
        valid = false;
        break;
      }
      TrajectorySample t;
      t.t = js.t;
      t.position = fk_position(m, s);
      t.velocity = fk_velocity(m, s, js.velocity).end_effector_velocity;
      out.push_back(t);
    }
    if (valid) return out;
  }
}

Outcome ik_refined(const LimbModel& m, const PipelineRun& run) {
  if (run.code != 0) return {false, "pipeline failed"};
  const MlpModel mlp = load_mlp_file((run.dir / "model.json").string());
  double worst = 0.0;
  int outside = 0;
  std::string detail;
  for (std::uint64_t seed : {2001, 2002, 2003}) {
    const auto path = reachable_trajectory(m, seed);
    const RmseReport net = evaluate_rmse(mlp, m, path);
    const RmseReport refined = evaluate_rmse_refined(mlp, m, path);
    worst = std::max(worst, refined.rmse.maxCoeff());
    for (const JointState& s : refined.solutions) outside += within_rom(m, s).ok() ? 0 : 1;
    detail += "path " + std::to_string(seed - 2000) + ": network " + num(net.rmse.maxCoeff()) +
              " m -> refined " + num(refined.rmse.maxCoeff()) + " m; ";
  }
  return {worst < 1e-6 && outside == 0, detail + "max refined RMSE " + num(worst) +
                                            " m (< 1e-6), " + std::to_string(outside) +
                                            " solutions outside the ROM"};
}

Outcome dynamics_oracles(const LimbModel& base) {
  // knee pendulum: hip locked, thigh along x, massless foot, gravity +y
  LimbModel m = base;
  m.links[2].mass = 0.0;
  m.links[2].inertia = InertiaOperator::principal(0, 0, 0);
  const double g = 9.81;
  m.gravity = {0.0, g, 0.0};
  const double mass = m.leg().mass, l = m.leg().com_offset.x();
  const double inertia = m.leg().inertia.to_matrix()(2, 2) + mass * l * l;
  double pend = 0.0;
  for (int k = 0; k < 100; ++k) {
    JointState s;
    s.theta = {0.0, deg2rad(-150.0 + 150.0 * k / 99.0), 0.2};
    const double qd = std::sin(0.37 * k) * 2.0, qdd = std::cos(0.53 * k) * 4.0;
    const double tau = inverse_dynamics(m, s, {0, qd, 0}, {0, qdd, 0}).torque(1);
    pend = std::max(pend, std::abs(tau - (inertia * qdd + mass * g * l * std::cos(s.theta(1)))));
  }

  std::mt19937_64 rng(3001);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto states = rom_states(base, 10'000, 3002);
  double rnea = 0.0;
  for (const JointState& s : states) {
    const Eigen::Vector3d qd(u(rng), u(rng), u(rng)), qdd(u(rng), u(rng), u(rng));
    const Eigen::Vector3d a = inverse_dynamics(base, s, qd, qdd).torque;
    const Eigen::Vector3d b = reference::inverse_dynamics(base, s, qd, qdd, base.gravity);
    rnea = std::max(rnea, (a - b).cwiseAbs().maxCoeff());
  }
  return {pend < 1e-8 && rnea < 1e-9, "pendulum max err " + num(pend) +
                                          " N m (< 1e-8) over 100 points; RNEA vs classical " +
                                          num(rnea) + " N m (< 1e-9) over 1e4 triples"};
}

Outcome energy_consistency(const LimbModel& m) {
  using State = Eigen::Matrix<double, 6, 1>;
  JointState s;
  s.n1 = PureQuaternion(0.3, 0.4, 0.866).normalized();
  s.n3 = PureQuaternion(0.5, -0.5, 0.7).normalized();
  auto at = [&](const State& y) {
    JointState st = s;
    st.theta = y.head<3>();
    return st;
  };
  auto energy = [&](const State& y) {
    return kinetic_energy(m, at(y), y.tail<3>()) + potential_energy(m, at(y));
  };
  // smooth actuation; the simulation integrates M qdd = tau - V - G
  auto torque = [](double t) {
    return Eigen::Vector3d(8.0 * std::sin(3.0 * t), 4.0 * std::cos(2.0 * t), std::sin(5.0 * t));
  };
  auto deriv = [&](double t, const State& y) {
    const MvgTerms terms = extract_mvg(m, at(y), y.tail<3>());
    State d;
    d << y.tail<3>(), terms.mass.ldlt().solve(torque(t) - terms.velocity - terms.gravity);
    return d;
  };
  auto power = [&](double t, const State& y) { return torque(t).dot(y.tail<3>()); };

  State y;
  y << 0.4, -0.8, 0.6, 0.5, -0.3, 0.8;
  const double dt = 1e-3, e0 = energy(y);
  double work = 0.0, abs_work = 0.0, drift = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double t = k * dt;
    const State k1 = deriv(t, y), k2 = deriv(t + dt / 2, y + dt / 2 * k1),
                k3 = deriv(t + dt / 2, y + dt / 2 * k2), k4 = deriv(t + dt, y + dt * k3);
    // work over the step by Simpson's rule on the RK4 stage states
    const double p0 = power(t, y), pm = power(t + dt / 2, y + dt / 2 * (k2 + k3) / 2);
    y += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    const double p1 = power(t + dt, y);
    work += dt / 6.0 * (p0 + 4 * pm + p1);
    abs_work += dt / 6.0 * (std::abs(p0) + 4 * std::abs(pm) + std::abs(p1));
    drift = std::max(drift, std::abs(energy(y) - e0 - work));
  }
  const double rel = drift / abs_work;
  return {rel < 1e-5, "2 s at 1 kHz (RK4), max |dE - work| / integral |P| = " + num(rel) +
                          " (< 1e-5)"};
}

Outcome jerk_energy_report(const PipelineRun& run) {
  if (run.code != 0) return {false, "pipeline failed"};
  const nlohmann::json rep = read_json(run.dir / "report.json");
  const auto& e = rep["jerk_energy"];
  const double total = e["cumulative"].get<double>();
  const bool pass = std::isfinite(total) && total >= 0.0 && e["duration_s"].get<double>() == 2.0 &&
                    e["reference_bound"].get<double>() == 0.4;
  return {pass, "cumulative " + num(total) + " (theta1 " +
                    num(e["per_joint"]["theta1"].get<double>()) + ", theta2 " +
                    num(e["per_joint"]["theta2"].get<double>()) + ", theta3 " +
                    num(e["per_joint"]["theta3"].get<double>()) +
                    ") at T = 2 s, reported beside the reference bound 0.4 " +
                    "(order-of-magnitude comparison only)"};
}

Outcome mass_matrix(const LimbModel& m) {
  std::mt19937_64 rng(4001);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double asym = 0.0, min_eig = 1e300, reassembly = 0.0;
  for (const JointState& s : rom_states(m, 1000, 4002)) {
    const Eigen::Vector3d qd(u(rng), u(rng), u(rng)), qdd(u(rng), u(rng), u(rng));
    const MvgTerms t = extract_mvg(m, s, qd);
    asym = std::max(asym, (t.mass - t.mass.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(t.mass)
                                    .eigenvalues()
                                    .minCoeff());
    const Eigen::Vector3d tau = inverse_dynamics(m, s, qd, qdd).torque;
    reassembly = std::max(reassembly,
                          (t.mass * qdd + t.velocity + t.gravity - tau).cwiseAbs().maxCoeff());
  }
  return {asym < 1e-9 && min_eig > 0.0 && reassembly < 1e-9,
          "max asymmetry " + num(asym) + " (< 1e-9), min eigenvalue " + num(min_eig) +
              " (> 0), reassembly err " + num(reassembly) + " N m (< 1e-9) over 1e3 states"};
}

}  // namespace

int main() {
  const LimbModel model = default_limb_model();
  report(1, "FK oracle equivalence", [&] { return fk_equivalence(model); });
  report(2, "velocity correctness", [&] { return velocity(model); });
  report(3, "minimum-jerk planning", [] { return min_jerk(); });

  std::cout << "      (running pipeline: 50,000 samples, default training options)" << std::endl;
  const PipelineRun run = run_pipeline();
  if (run.code != 0) std::cout << run.err;
  report(4, "IK at desk scale", [&] { return ik_desk_scale(model, run); });
  report(5, "IK refinement on reachable trajectories", [&] { return ik_refined(model, run); });
  report(6, "dynamics oracles", [&] { return dynamics_oracles(model); });
  report(7, "energy consistency", [&] { return energy_consistency(model); });
  report(8, "jerk energy reported", [&] { return jerk_energy_report(run); });
  report(9, "mass-matrix properties", [&] { return mass_matrix(model); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
