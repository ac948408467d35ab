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

/// Two-layer feed-forward network (sigmoid hidden layer, linear output
/// layer) trained by Levenberg-Marquardt.
///
/// Inputs and targets are standardized to zero mean and unit variance with
/// statistics stored in the model. Training minimizes the sum of squared
/// standardized residuals with damped Gauss-Newton steps
///
///   (J^T J + lambda I) dw = -J^T e
///
/// where J is assembled by backpropagation. The normal equations are
/// accumulated over row chunks, so memory stays bounded by the chunk size
/// while every step still uses the whole training split. lambda is divided
/// by 10 after an accepted step and multiplied by 10 after a rejected one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "json.hpp"

#include "dqlimb/error.hpp"

namespace dqlimb {

inline constexpr int kMlpFormatVersion = 1;
inline constexpr const char* kMlpFormatName = "dqlimb-mlp";

class MlpModel {
 public:
  MlpModel() : MlpModel(6, 20, 9) {}
  MlpModel(int inputs, int hidden, int outputs)
      : hidden_weights_(Eigen::MatrixXd::Zero(hidden, inputs)),
        hidden_bias_(Eigen::VectorXd::Zero(hidden)),
        output_weights_(Eigen::MatrixXd::Zero(outputs, hidden)),
        output_bias_(Eigen::VectorXd::Zero(outputs)),
        input_mean_(Eigen::VectorXd::Zero(inputs)),
        input_std_(Eigen::VectorXd::Ones(inputs)),
        output_mean_(Eigen::VectorXd::Zero(outputs)),
        output_std_(Eigen::VectorXd::Ones(outputs)) {}

  int inputs() const { return static_cast<int>(hidden_weights_.cols()); }
  int hidden() const { return static_cast<int>(hidden_weights_.rows()); }
  int outputs() const { return static_cast<int>(output_weights_.rows()); }
  int parameter_count() const { return hidden() * (inputs() + 1) + outputs() * (hidden() + 1); }

  const Eigen::MatrixXd& hidden_weights() const { return hidden_weights_; }
  const Eigen::VectorXd& hidden_bias() const { return hidden_bias_; }
  const Eigen::MatrixXd& output_weights() const { return output_weights_; }
  const Eigen::VectorXd& output_bias() const { return output_bias_; }

  void set_normalization(const Eigen::VectorXd& in_mean, const Eigen::VectorXd& in_std,
                         const Eigen::VectorXd& out_mean, const Eigen::VectorXd& out_std) {
    input_mean_ = in_mean;
    input_std_ = in_std;
    output_mean_ = out_mean;
    output_std_ = out_std;
  }
  const Eigen::VectorXd& input_mean() const { return input_mean_; }
  const Eigen::VectorXd& input_std() const { return input_std_; }
  const Eigen::VectorXd& output_mean() const { return output_mean_; }
  const Eigen::VectorXd& output_std() const { return output_std_; }

  /// Parameters packed as [W1 row-major, b1, W2 row-major, b2].
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd p(parameter_count());
    int k = 0;
    for (int j = 0; j < hidden(); ++j)
      for (int i = 0; i < inputs(); ++i) p(k++) = hidden_weights_(j, i);
    for (int j = 0; j < hidden(); ++j) p(k++) = hidden_bias_(j);
    for (int o = 0; o < outputs(); ++o)
      for (int j = 0; j < hidden(); ++j) p(k++) = output_weights_(o, j);
    for (int o = 0; o < outputs(); ++o) p(k++) = output_bias_(o);
    return p;
  }

  void set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != parameter_count()) throw InputError("parameter vector has wrong size");
    int k = 0;
    for (int j = 0; j < hidden(); ++j)
      for (int i = 0; i < inputs(); ++i) hidden_weights_(j, i) = p(k++);
    for (int j = 0; j < hidden(); ++j) hidden_bias_(j) = p(k++);
    for (int o = 0; o < outputs(); ++o)
      for (int j = 0; j < hidden(); ++j) output_weights_(o, j) = p(k++);
    for (int o = 0; o < outputs(); ++o) output_bias_(o) = p(k++);
  }

  static double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

  /// Forward pass on standardized data, one row per sample.
  Eigen::MatrixXd forward_standardized(const Eigen::MatrixXd& z) const {
    Eigen::MatrixXd h = (z * hidden_weights_.transpose()).rowwise() + hidden_bias_.transpose();
    h = h.unaryExpr([](double a) { return sigmoid(a); });
    return (h * output_weights_.transpose()).rowwise() + output_bias_.transpose();
  }

  Eigen::MatrixXd standardize_inputs(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - input_mean_.transpose()).array().rowwise() /
           input_std_.transpose().array();
  }
  Eigen::MatrixXd standardize_outputs(const Eigen::MatrixXd& y) const {
    return (y.rowwise() - output_mean_.transpose()).array().rowwise() /
           output_std_.transpose().array();
  }
  Eigen::MatrixXd destandardize_outputs(const Eigen::MatrixXd& y) const {
    return (y.array().rowwise() * output_std_.transpose().array()).matrix().rowwise() +
           output_mean_.transpose();
  }

  /// Batch inference in raw units, one row per sample.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const {
    return destandardize_outputs(forward_standardized(standardize_inputs(x)));
  }

  Eigen::VectorXd predict_one(const Eigen::VectorXd& x) const {
    return predict(x.transpose()).row(0).transpose();
  }

  bool is_finite() const {
    return hidden_weights_.allFinite() && hidden_bias_.allFinite() &&
           output_weights_.allFinite() && output_bias_.allFinite();
  }

 private:
  Eigen::MatrixXd hidden_weights_;  // hidden x inputs
  Eigen::VectorXd hidden_bias_;
  Eigen::MatrixXd output_weights_;  // outputs x hidden
  Eigen::VectorXd output_bias_;
  Eigen::VectorXd input_mean_, input_std_;
  Eigen::VectorXd output_mean_, output_std_;
};

// Persistence ----------------------------------------------------------------

namespace detail {

inline nlohmann::json to_json_array(const Eigen::MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

inline Eigen::MatrixXd from_json_array(const nlohmann::json& doc, const char* key, int rows,
                                       int cols) {
  if (!doc.contains(key) || !doc[key].is_array() ||
      doc[key].size() != static_cast<std::size_t>(rows * cols)) {
    throw ParseError(std::string("model.") + key + ": expected " + std::to_string(rows * cols) +
                     " numbers");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto& v = doc[key][k++];
      if (!v.is_number()) throw ParseError(std::string("model.") + key + ": non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Versioned JSON document: dimensions, normalization statistics and
/// row-major weight arrays. Doubles are written in shortest round-trip form.
inline std::string dump_mlp(const MlpModel& m) {
  nlohmann::ordered_json doc;
  doc["format"] = kMlpFormatName;
  doc["version"] = kMlpFormatVersion;
  doc["inputs"] = m.inputs();
  doc["hidden"] = m.hidden();
  doc["outputs"] = m.outputs();
  doc["hidden_activation"] = "sigmoid";
  doc["output_activation"] = "linear";
  doc["input_mean"] = detail::to_json_array(m.input_mean().transpose());
  doc["input_std"] = detail::to_json_array(m.input_std().transpose());
  doc["output_mean"] = detail::to_json_array(m.output_mean().transpose());
  doc["output_std"] = detail::to_json_array(m.output_std().transpose());
  doc["hidden_weights"] = detail::to_json_array(m.hidden_weights());
  doc["hidden_bias"] = detail::to_json_array(m.hidden_bias().transpose());
  doc["output_weights"] = detail::to_json_array(m.output_weights());
  doc["output_bias"] = detail::to_json_array(m.output_bias().transpose());
  return doc.dump(1) + "\n";
}

inline MlpModel load_mlp(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (doc.value("format", "") != kMlpFormatName) throw ParseError("model.format: not a dqlimb-mlp document");
  if (doc.value("version", 0) != kMlpFormatVersion) {
    throw ParseError("model.version: unsupported version");
  }
  if (doc.value("hidden_activation", "") != "sigmoid" ||
      doc.value("output_activation", "") != "linear") {
    throw ParseError("model: only sigmoid hidden / linear output layers are supported");
  }
  const int in = doc.value("inputs", 0), hid = doc.value("hidden", 0), out = doc.value("outputs", 0);
  if (in <= 0 || hid <= 0 || out <= 0) throw ParseError("model: dimensions must be positive");
  MlpModel m(in, hid, out);
  const Eigen::MatrixXd w1 = detail::from_json_array(doc, "hidden_weights", hid, in);
  const Eigen::MatrixXd b1 = detail::from_json_array(doc, "hidden_bias", 1, hid);
  const Eigen::MatrixXd w2 = detail::from_json_array(doc, "output_weights", out, hid);
  const Eigen::MatrixXd b2 = detail::from_json_array(doc, "output_bias", 1, out);
  Eigen::VectorXd p(m.parameter_count());
  p << Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(w1.transpose()).data(), hid * in),
      b1.transpose(),
      Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(w2.transpose()).data(), out * hid),
      b2.transpose();
  m.set_parameters(p);
  m.set_normalization(detail::from_json_array(doc, "input_mean", 1, in).transpose(),
                      detail::from_json_array(doc, "input_std", 1, in).transpose(),
                      detail::from_json_array(doc, "output_mean", 1, out).transpose(),
                      detail::from_json_array(doc, "output_std", 1, out).transpose());
  if (!m.is_finite()) throw ParseError("model: non-finite weights");
  return m;
}

inline MlpModel load_mlp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_mlp(ss.str());
}

// Training -------------------------------------------------------------------

struct TrainOptions {
  int hidden = 20;
  int max_epochs = 200;
  double lambda_initial = 1e-3;
  double lambda_factor = 10.0;
  double lambda_max = 1e10;
  double gradient_tolerance = 1e-7;
  double validation_fraction = 0.1;
  std::size_t chunk_rows = 10'000;  // residual rows per normal-equation chunk
  std::uint64_t seed = 1;
  /// Called after every accepted step with (epoch, training mse, lambda).
  std::function<void(int, double, double)> on_epoch;
};

struct TrainReport {
  int epochs = 0;                          // accepted LM steps
  double final_training_loss = 0.0;       // mse over standardized outputs
  std::vector<double> loss_history;        // initial loss, then one per accepted step
  Eigen::VectorXd validation_rmse;         // per output, raw units
  std::string stop_reason;
  double wall_seconds = 0.0;
};

namespace detail {

/// Sum of squared standardized residuals.
inline double sse(const MlpModel& m, const Eigen::MatrixXd& z, const Eigen::MatrixXd& y) {
  return (m.forward_standardized(z) - y).squaredNorm();
}

/// Accumulates J^T J and J^T e for rows [begin, end).
inline void accumulate_normal_equations(const MlpModel& m, const Eigen::MatrixXd& z,
                                        const Eigen::MatrixXd& y, Eigen::Index begin,
                                        Eigen::Index end, Eigen::MatrixXd& jtj,
                                        Eigen::VectorXd& jte) {
  const int nin = m.inputs(), nh = m.hidden(), nout = m.outputs();
  const int hidden_params = nh * (nin + 1);
  const Eigen::Index rows = (end - begin) * nout;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, m.parameter_count());
  Eigen::VectorXd err(rows);
  const Eigen::MatrixXd& w2 = m.output_weights();

  for (Eigen::Index s = begin; s < end; ++s) {
    const Eigen::VectorXd zin = z.row(s).transpose();
    Eigen::VectorXd h = m.hidden_weights() * zin + m.hidden_bias();
    h = h.unaryExpr([](double a) { return MlpModel::sigmoid(a); });
    const Eigen::VectorXd dh = h.array() * (1.0 - h.array());
    const Eigen::VectorXd out = w2 * h + m.output_bias();
    for (int o = 0; o < nout; ++o) {
      const Eigen::Index r = (s - begin) * nout + o;
      err(r) = out(o) - y(s, o);
      auto row = jac.row(r);
      for (int j = 0; j < nh; ++j) {
        const double g = w2(o, j) * dh(j);
        for (int i = 0; i < nin; ++i) row(j * nin + i) = g * zin(i);
        row(nh * nin + j) = g;
      }
      const int base = hidden_params + o * nh;
      for (int j = 0; j < nh; ++j) row(base + j) = h(j);
      row(hidden_params + nout * nh + o) = 1.0;
    }
  }
  jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
  jte.noalias() += jac.transpose() * err;
}

}  // namespace detail

/// Trains a fresh network on (inputs, targets), one row per sample.
/// The last validation_fraction of a seeded shuffle is held out.
/// Throws EmptyDataset (fewer than 100 rows) and DivergedTraining.
inline MlpModel train_mlp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                          const TrainOptions& opt, TrainReport* report_out = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  const Eigen::Index n = inputs.rows();
  if (n < 100 || targets.rows() != n) {
    throw EmptyDataset("training needs at least 100 rows with matching targets, got " +
                       std::to_string(n));
  }
  const int nin = static_cast<int>(inputs.cols());
  const int nout = static_cast<int>(targets.cols());

  std::mt19937_64 rng(opt.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const Eigen::Index n_val = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(opt.validation_fraction * static_cast<double>(n))),
      Eigen::Index{0}, n - 1);
  const Eigen::Index n_train = n - n_val;

  Eigen::MatrixXd x_train(n_train, nin), y_train(n_train, nout);
  Eigen::MatrixXd x_val(n_val, nin), y_val(n_val, nout);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    if (i < n_train) {
      x_train.row(i) = inputs.row(src);
      y_train.row(i) = targets.row(src);
    } else {
      x_val.row(i - n_train) = inputs.row(src);
      y_val.row(i - n_train) = targets.row(src);
    }
  }

  auto stats = [](const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
    mean = m.colwise().mean().transpose();
    sd = ((m.rowwise() - mean.transpose()).array().square().colwise().sum() /
          static_cast<double>(m.rows()))
             .sqrt()
             .transpose();
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
      if (!(sd(i) > 1e-12)) sd(i) = 1.0;
    }
  };
  Eigen::VectorXd in_mean, in_std, out_mean, out_std;
  stats(x_train, in_mean, in_std);
  stats(y_train, out_mean, out_std);

  MlpModel model(nin, opt.hidden, nout);
  model.set_normalization(in_mean, in_std, out_mean, out_std);
  {
    Eigen::VectorXd p(model.parameter_count());
    const double lim1 = std::sqrt(6.0 / (nin + opt.hidden));
    const double lim2 = std::sqrt(6.0 / (opt.hidden + nout));
    const int hidden_params = opt.hidden * (nin + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng) * (i < hidden_params ? lim1 : lim2);
    model.set_parameters(p);
  }

  const Eigen::MatrixXd z_train = model.standardize_inputs(x_train);
  const Eigen::MatrixXd t_train = model.standardize_outputs(y_train);
  const double denom = static_cast<double>(n_train * nout);

  TrainReport report;
  double lambda = opt.lambda_initial;
  double loss = detail::sse(model, z_train, t_train);
  if (!std::isfinite(loss)) throw DivergedTraining("initial training loss is not finite");
  report.loss_history.push_back(loss / denom);
  report.stop_reason = "max_epochs";

  const int np = model.parameter_count();
  const Eigen::Index chunk = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(opt.chunk_rows) / std::max(1, nout));
  Eigen::MatrixXd jtj(np, np);
  Eigen::VectorXd jte(np);

  while (report.epochs < opt.max_epochs) {
    jtj.setZero();
    jte.setZero();
    for (Eigen::Index b = 0; b < n_train; b += chunk) {
      detail::accumulate_normal_equations(model, z_train, t_train, b, std::min(n_train, b + chunk),
                                          jtj, jte);
    }
    jtj.triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
    if (!jte.allFinite()) throw DivergedTraining("gradient is not finite");
    if (jte.norm() < opt.gradient_tolerance) {
      report.stop_reason = "gradient_tolerance";
      break;
    }

    const Eigen::VectorXd w = model.parameters();
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda;
      const Eigen::VectorXd step = a.ldlt().solve(-jte);
      model.set_parameters(w + step);
      const double trial = step.allFinite() ? detail::sse(model, z_train, t_train)
                                            : std::numeric_limits<double>::quiet_NaN();
      if (std::isfinite(trial) && trial < loss) {
        loss = trial;
        lambda = std::max(lambda / opt.lambda_factor, 1e-20);
        accepted = true;
      } else {
        lambda *= opt.lambda_factor;
        if (lambda > opt.lambda_max) break;
      }
    }
    if (!accepted) {
      model.set_parameters(w);
      report.stop_reason = "lambda_max";
      break;
    }
    ++report.epochs;
    report.loss_history.push_back(loss / denom);
    if (opt.on_epoch) opt.on_epoch(report.epochs, loss / denom, lambda);
  }

  if (!model.is_finite()) throw DivergedTraining("weights became non-finite");
  report.final_training_loss = loss / denom;
  if (n_val > 0) {
    const Eigen::MatrixXd pred = model.predict(x_val);
    report.validation_rmse =
        ((pred - y_val).array().square().colwise().sum() / static_cast<double>(n_val))
            .sqrt()
            .transpose();
  } else {
    report.validation_rmse = Eigen::VectorXd::Zero(nout);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (report_out) *report_out = std::move(report);
  return model;
}

}  // namespace dqlimb
