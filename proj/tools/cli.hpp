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

// Command-line front end. run_command() is the whole program minus argv
// handling, so tests drive it directly.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqlimb/dqlimb.hpp"
#include "dqlimb/verification.hpp"

namespace dqlimb::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  std::string config;  // empty: built-in default limb
  std::string out = "out";
  std::uint64_t seed = 1;
  int samples = 500;
  double duration = 2.0;
  std::size_t dataset_size = 400'000;
  std::string p0, p1;  // "x,y,z"; empty: reference reach
  // fk
  std::string theta, n1 = "0,0,1", n3 = "0,0,1", rates = "0,0,0";
  // train
  int epochs = 200;
  int hidden = 20;
  // inputs of individual stages; empty: the file in --out
  std::string dataset, model, trajectory, joints;
};

inline Eigen::Vector3d parse_vec3(const std::string& text, const std::string& flag) {
  const auto parts = io::split(text);
  if (parts.size() != 3) throw ParseError(flag + ": expected three comma-separated numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = io::parse_double(parts[static_cast<std::size_t>(i)], flag);
  return v;
}

inline std::string json_double(double v) { return io::format_double(v); }

inline LimbModel load_model(const Options& o) {
  return o.config.empty() ? default_limb_model() : load_limb_config_file(o.config);
}

inline fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("--out: cannot create directory '" + o.out + "': " + ec.message());
  return dir;
}

inline fs::path input_path(const std::string& given, const Options& o, const char* name) {
  return given.empty() ? fs::path(o.out) / name : fs::path(given);
}

inline std::ifstream open_input(const fs::path& p, const char* flag) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(std::string(flag) + ": cannot open '" + p.string() + "'");
  return in;
}

inline void write_json(const fs::path& p, const ordered_json& doc) {
  io::write_atomically(p, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

inline ordered_json vec3_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

inline ordered_json xyz_json(const Eigen::Vector3d& v) {
  return {{"x", v.x()}, {"y", v.y()}, {"z", v.z()}};
}

inline ordered_json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingArtifacts("missing artifact '" + p.string() + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

// Stages ---------------------------------------------------------------------

inline BoundaryConditions boundary_conditions(const Options& o) {
  BoundaryConditions bc = BoundaryConditions::reference_reach(o.duration);
  if (!o.p0.empty()) bc.p0 = parse_vec3(o.p0, "--p0");
  if (!o.p1.empty()) bc.p1 = parse_vec3(o.p1, "--p1");
  return bc;
}

inline std::string stage_plan(const Options& o) {
  const auto samples = plan_min_jerk(boundary_conditions(o), o.samples);
  const fs::path path = out_dir(o) / "trajectory.csv";
  io::write_atomically(path, [&](std::ostream& os) { write_trajectory_csv(os, samples); });
  return "plan: " + std::to_string(samples.size()) + " samples over " +
         json_double(o.duration) + " s -> " + path.string();
}

inline JointState parse_state(const Options& o) {
  if (o.theta.empty()) throw ValidationError("--theta: required (degrees, theta1,theta2,theta3)");
  JointState s;
  s.theta = parse_vec3(o.theta, "--theta") * kPi / 180.0;
  s.n1 = PureQuaternion(parse_vec3(o.n1, "--n1"));
  s.n3 = PureQuaternion(parse_vec3(o.n3, "--n3"));
  s.validate();
  return s;
}

inline std::string stage_fk(const Options& o) {
  const LimbModel model = load_model(o);
  const JointState s = parse_state(o);
  const RomReport rom = within_rom(model, s);
  if (!rom.ok()) throw RomViolation("state outside range of motion: " + rom.violations());
  const JointRates rates = parse_vec3(o.rates, "--rates") * kPi / 180.0;
  const PoseResult pose = fk_pose(model, s);
  const VelocityResult vel = fk_velocity(model, s, rates);
  const Eigen::Vector3d p = pose.end_effector;

  ordered_json doc;
  doc["position_m"] = vec3_json(p);
  doc["velocity_m_s"] = vec3_json(vel.end_effector_velocity);
  ordered_json pts = ordered_json::array();
  for (const auto& c : pose.chain_points) pts.push_back(vec3_json(c));
  doc["chain_points_m"] = pts;
  ordered_json angles;
  for (const RomCheck& c : rom.checks) {
    angles[std::string(kRomConstraintNames[static_cast<int>(c.constraint)])] =
        rad2deg(c.value);
  }
  doc["rom_degrees"] = angles;
  const fs::path path = out_dir(o) / "fk.json";
  write_json(path, doc);
  return "fk: foot tip (" + json_double(p.x()) + ", " + json_double(p.y()) + ", " +
         json_double(p.z()) + ") m -> " + path.string();
}

inline std::string stage_dataset(const Options& o) {
  if (o.dataset_size == 0) throw InvalidSampleCount("--dataset-size: must be at least 1");
  const LimbModel model = load_model(o);
  DatasetOptions opt;
  opt.workers = std::max(1u, std::thread::hardware_concurrency());
  const fs::path path = out_dir(o) / "dataset.csv";
  io::write_atomically(path, [&](std::ostream& os) {
    stream_dataset_csv(os, model, o.dataset_size, o.seed, opt);
  });
  return "dataset: " + std::to_string(o.dataset_size) + " samples -> " + path.string();
}

inline std::string stage_train(const Options& o) {
  const fs::path src = input_path(o.dataset, o, "dataset.csv");
  std::ifstream in = open_input(src, "--dataset");
  const DatasetMatrices data = read_dataset_csv(in);
  TrainOptions opt;
  opt.hidden = o.hidden;
  opt.max_epochs = o.epochs;
  opt.seed = o.seed;
  TrainReport rep;
  const MlpModel mlp = train_mlp(data.inputs, data.targets, opt, &rep);

  const fs::path dir = out_dir(o);
  io::write_atomically(dir / "model.json", [&](std::ostream& os) { os << dump_mlp(mlp); });
  ordered_json doc;
  doc["samples"] = data.inputs.rows();
  doc["epochs"] = rep.epochs;
  doc["final_training_loss"] = rep.final_training_loss;
  doc["stop_reason"] = rep.stop_reason;
  doc["validation_rmse"] = std::vector<double>(rep.validation_rmse.data(),
                                               rep.validation_rmse.data() +
                                                   rep.validation_rmse.size());
  doc["loss_history"] = rep.loss_history;
  doc["wall_seconds"] = rep.wall_seconds;
  write_json(dir / "train.json", doc);
  return "train: " + std::to_string(rep.epochs) + " epochs, loss " +
         json_double(rep.final_training_loss) + " (" + rep.stop_reason + ") -> " +
         (dir / "model.json").string();
}

inline std::string stage_ik(const Options& o, bool refine) {
  const LimbModel limb = load_model(o);
  const MlpModel mlp = load_mlp_file(input_path(o.model, o, "model.json").string());
  std::ifstream in = open_input(input_path(o.trajectory, o, "trajectory.csv"), "--trajectory");
  const auto samples = read_trajectory_csv(in);

  const auto start = std::chrono::steady_clock::now();
  const auto predictions = ik_infer_batch(mlp, samples);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const RmseReport net = evaluate_rmse(limb, samples, [&](std::size_t i, const TrajectorySample&) {
    return predictions[i].state;
  });

  const fs::path dir = out_dir(o);
  io::write_atomically(dir / "joints.csv",
                       [&](std::ostream& os) { write_joint_csv(os, samples, net.solutions); });
  io::write_atomically(dir / "errors.csv",
                       [&](std::ostream& os) { write_error_csv(os, samples, net); });
  ordered_json doc;
  doc["samples"] = samples.size();
  doc["duration_s"] = samples.back().t - samples.front().t;
  doc["rmse_m"] = xyz_json(net.rmse);
  doc["inference_wall_seconds"] = seconds;
  std::string summary = "ik: rmse (" + json_double(net.rmse.x()) + ", " +
                        json_double(net.rmse.y()) + ", " + json_double(net.rmse.z()) + ") m";
  if (refine) {
    const RmseReport ref = evaluate_rmse_refined(mlp, limb, samples);
    io::write_atomically(dir / "joints_refined.csv",
                         [&](std::ostream& os) { write_joint_csv(os, samples, ref.solutions); });
    io::write_atomically(dir / "errors_refined.csv",
                         [&](std::ostream& os) { write_error_csv(os, samples, ref); });
    doc["rmse_refined_m"] = xyz_json(ref.rmse);
    summary += ", refined (" + json_double(ref.rmse.x()) + ", " + json_double(ref.rmse.y()) +
               ", " + json_double(ref.rmse.z()) + ") m";
  }
  write_json(dir / "ik.json", doc);
  return summary;
}

/// First derivative of uniformly sampled data: central differences inside,
/// second-order one-sided differences at the ends.
inline std::vector<Eigen::Vector3d> differentiate(const std::vector<Eigen::Vector3d>& v,
                                                  double h) {
  const std::size_t n = v.size();
  std::vector<Eigen::Vector3d> d(n, Eigen::Vector3d::Zero());
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / h;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  return d;
}

inline std::string stage_dynamics(const Options& o) {
  const LimbModel model = load_model(o);
  std::ifstream in = open_input(input_path(o.joints, o, "joints.csv"), "--joints");
  const JointSeries series = read_joint_csv(in);
  if (series.states.size() < 3) throw TooFewSamples("joints: need at least 3 samples");
  const double h = (series.t.back() - series.t.front()) / static_cast<double>(series.t.size() - 1);
  if (!(h > 0.0)) throw InvalidDuration("joints: time column must increase");
  std::vector<Eigen::Vector3d> q;
  for (const JointState& s : series.states) q.push_back(s.theta);
  const auto qd = differentiate(q, h);
  const auto qdd = differentiate(qd, h);

  std::vector<Eigen::Vector3d> tau;
  double peak = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    tau.push_back(inverse_dynamics(model, series.states[i], qd[i], qdd[i]).torque);
    peak = std::max(peak, tau.back().cwiseAbs().maxCoeff());
  }
  const fs::path path = out_dir(o) / "torques.csv";
  io::write_atomically(path, [&](std::ostream& os) {
    os << "t,tau1,tau2,tau3\n";
    for (std::size_t i = 0; i < tau.size(); ++i) {
      os << io::format_double(series.t[i]);
      for (int k = 0; k < 3; ++k) os << ',' << io::format_double(tau[i](k));
      os << '\n';
    }
  });
  return "dynamics: " + std::to_string(tau.size()) + " samples, peak |tau| " +
         json_double(peak) + " N m -> " + path.string();
}

inline std::vector<CheckResult> stage_verify(const Options& o, std::ostream& out) {
  const auto results = run_verification(load_model(o), o.seed);
  ordered_json doc;
  for (const CheckResult& r : results) {
    doc[r.name] = {{"error", r.error},
                   {"tolerance", r.tolerance},
                   {"status", r.passed() ? "pass" : "fail"}};
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << " error=" << json_double(r.error)
        << " tolerance=" << json_double(r.tolerance) << '\n';
  }
  write_json(out_dir(o) / "verify.json", doc);
  return results;
}

// Report ---------------------------------------------------------------------

inline constexpr double kReferenceJerkBound = 0.4;

/// Builds report.json from the artifacts of a pipeline run in `dir`. Depends
/// only on those files, so regenerating it gives identical bytes.
inline std::string emit_report(const fs::path& dir) {
  for (const char* name : {"ik.json", "train.json", "verify.json", "joints.csv", "torques.csv"}) {
    if (!fs::exists(dir / name)) {
      throw MissingArtifacts("missing artifact '" + (dir / name).string() + "'");
    }
  }
  const ordered_json ik = read_json(dir / "ik.json");
  const ordered_json train = read_json(dir / "train.json");
  const ordered_json verify = read_json(dir / "verify.json");
  std::ifstream in = open_input(dir / "joints.csv", "joints");
  const JointSeries series = read_joint_csv(in);
  const double duration = series.t.back() - series.t.front();

  ordered_json energy;
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> angle;
    for (const JointState& s : series.states) angle.push_back(s.theta(j));
    const double e = jerk_energy(angle, duration);
    energy["theta" + std::to_string(j + 1)] = e;
    total += e;
  }

  ordered_json doc;
  doc["format"] = "dqlimb-report";
  doc["version"] = 1;
  doc["rmse_m"] = ik.at("rmse_m");
  if (ik.contains("rmse_refined_m")) doc["rmse_refined_m"] = ik.at("rmse_refined_m");
  doc["jerk_energy"] = {
      {"cumulative", total},
      {"per_joint", energy},
      {"duration_s", duration},
      {"reference_bound", kReferenceJerkBound},
      {"below_reference_bound", total < kReferenceJerkBound},
      {"note",
       "integral of squared joint-angle jerk (rad^2/s^5); the reference bound is an "
       "order-of-magnitude comparison only"}};
  doc["inference"] = {{"samples", ik.at("samples")},
                      {"wall_seconds", ik.at("inference_wall_seconds")}};
  doc["training"] = {{"samples", train.at("samples")},
                     {"epochs", train.at("epochs")},
                     {"final_training_loss", train.at("final_training_loss")},
                     {"stop_reason", train.at("stop_reason")},
                     {"wall_seconds", train.at("wall_seconds")}};
  doc["oracles"] = verify;
  return doc.dump(2) + "\n";
}

inline void write_report(const fs::path& dir) {
  const std::string text = emit_report(dir);
  io::write_atomically(dir / "report.json", [&](std::ostream& os) { os << text; });
}

// Dispatch -------------------------------------------------------------------

inline void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "limb config JSON (default: built-in limb)");
  app->add_option("--out", o.out, "output directory")->capture_default_str();
  app->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

inline void add_trajectory(CLI::App* app, Options& o) {
  app->add_option("--samples", o.samples, "trajectory samples")->capture_default_str();
  app->add_option("--duration", o.duration, "trajectory duration in s")->capture_default_str();
  app->add_option("--p0", o.p0, "start position x,y,z in m (default 0.8,-0.06,0.1)");
  app->add_option("--p1", o.p1, "end position x,y,z in m (default 0.7,0.48,0.08)");
}

inline void add_training(CLI::App* app, Options& o) {
  app->add_option("--epochs", o.epochs, "maximum LM epochs")->capture_default_str();
  app->add_option("--hidden", o.hidden, "hidden sigmoid units")->capture_default_str();
}

/// Runs one invocation. Returns 0 on success, 1 on invalid input, 2 on
/// numerical failure.
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  Options o;
  CLI::App app{"Lower-limb kinematics, inverse kinematics and dynamics", "dqlimb"};
  app.require_subcommand(1);

  auto* plan = app.add_subcommand("plan", "plan a minimum-jerk foot trajectory");
  add_common(plan, o);
  add_trajectory(plan, o);

  auto* fk = app.add_subcommand("fk", "forward kinematics of one joint state");
  add_common(fk, o);
  fk->add_option("--theta", o.theta, "joint angles in degrees")->required();
  fk->add_option("--n1", o.n1, "hip axis x,y,z")->capture_default_str();
  fk->add_option("--n3", o.n3, "ankle axis x,y,z")->capture_default_str();
  fk->add_option("--rates", o.rates, "joint rates in deg/s")->capture_default_str();

  auto* dataset = app.add_subcommand("dataset", "generate the IK training dataset");
  add_common(dataset, o);
  dataset->add_option("--dataset-size", o.dataset_size, "training samples")->capture_default_str();

  auto* train = app.add_subcommand("train", "train the IK network");
  add_common(train, o);
  add_training(train, o);
  train->add_option("--dataset", o.dataset, "dataset CSV (default: <out>/dataset.csv)");

  auto* ik = app.add_subcommand("ik", "solve IK along a planned trajectory");
  add_common(ik, o);
  ik->add_option("--model", o.model, "network file (default: <out>/model.json)");
  ik->add_option("--trajectory", o.trajectory,
                 "trajectory CSV (default: <out>/trajectory.csv)");
  bool refine = false;
  ik->add_flag("--refine", refine, "also refine each solution numerically");

  auto* dyn = app.add_subcommand("dynamics", "joint torques along a joint trajectory");
  add_common(dyn, o);
  dyn->add_option("--joints", o.joints, "joint CSV (default: <out>/joints.csv)");

  auto* pipeline = app.add_subcommand("pipeline", "plan, dataset, train, ik, dynamics, report");
  add_common(pipeline, o);
  add_trajectory(pipeline, o);
  add_training(pipeline, o);
  pipeline->add_option("--dataset-size", o.dataset_size, "training samples")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run the oracle checks");
  add_common(verify, o);

  auto* report = app.add_subcommand("report", "rebuild report.json from pipeline artifacts");
  add_common(report, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (plan->parsed()) {
      out << stage_plan(o) << '\n';
    } else if (fk->parsed()) {
      out << stage_fk(o) << '\n';
    } else if (dataset->parsed()) {
      out << stage_dataset(o) << '\n';
    } else if (train->parsed()) {
      out << stage_train(o) << '\n';
    } else if (ik->parsed()) {
      out << stage_ik(o, refine) << '\n';
    } else if (dyn->parsed()) {
      out << stage_dynamics(o) << '\n';
    } else if (verify->parsed()) {
      std::ostringstream lines;
      const auto results = stage_verify(o, lines);
      out << lines.str();
      int failed = 0;
      for (const auto& r : results) failed += r.passed() ? 0 : 1;
      if (failed > 0) {
        err << "error: " << failed << " oracle check(s) failed\n";
        return 2;
      }
      out << "verify: all " << results.size() << " checks passed\n";
    } else if (report->parsed()) {
      write_report(o.out);
      out << "report: -> " << (fs::path(o.out) / "report.json").string() << '\n';
    } else if (pipeline->parsed()) {
      Options stage = o;
      stage.dataset = stage.model = stage.trajectory = stage.joints = "";
      err << stage_plan(stage) << '\n';
      err << stage_dataset(stage) << '\n';
      err << stage_train(stage) << '\n';
      err << stage_ik(stage, true) << '\n';
      err << stage_dynamics(stage) << '\n';
      std::ostringstream lines;
      stage_verify(stage, lines);
      err << lines.str();
      write_report(stage.out);
      const ordered_json rep = ordered_json::parse(emit_report(stage.out));
      const auto& r = rep["rmse_m"];
      out << "pipeline: rmse (" << json_double(r["x"].get<double>()) << ", "
          << json_double(r["y"].get<double>()) << ", " << json_double(r["z"].get<double>())
          << ") m, jerk energy "
          << json_double(rep["jerk_energy"]["cumulative"].get<double>()) << " -> "
          << (fs::path(o.out) / "report.json").string() << '\n';
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace dqlimb::cli
