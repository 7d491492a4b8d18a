/*
 * Copyright 2026 The Proprio Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "proprio/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "proprio/rng.hpp"

namespace proprio {

const char* const kAxisNames[kNumAxes] = {"x", "y", "z", "roll", "pitch", "yaw"};

namespace {

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) {
    throw ConfigError("mlp: need at least input and output widths");
  }
  for (int w : widths) {
    if (w < 1) {
      throw ConfigError("mlp: layer widths must be positive");
    }
  }
}

Matrix relu(Matrix z) { return z.cwiseMax(0.0); }

}  // namespace

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  check_widths(widths_);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    weights_.emplace_back(Matrix::Zero(widths_[l + 1], widths_[l]));
    biases_.emplace_back(Vector::Zero(widths_[l + 1]));
  }
}

Mlp Mlp::init(std::vector<int> widths, std::uint64_t seed) {
  Mlp m(std::move(widths));
  for (int l = 0; l < m.n_layers(); ++l) {
    const auto fan_in = static_cast<double>(m.widths_[l]);
    const auto fan_out = static_cast<double>(m.widths_[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    rng::Stream stream(rng::mix(seed, 0x1217u, static_cast<std::uint64_t>(l)));
    Matrix& w = m.weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = stream.next_uniform(-limit, limit);
      }
    }
  }
  return m;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < n_layers(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size()) +
         static_cast<std::size_t>(biases_[l].size());
  }
  return n;
}

bool Mlp::finite() const {
  for (int l = 0; l < n_layers(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

Matrix Mlp::forward(const Matrix& x) const {
  if (x.cols() != input_size()) {
    throw InvariantError("mlp: input width mismatch");
  }
  Matrix h = x;
  for (int l = 0; l < n_layers(); ++l) {
    Matrix z = h * weights_[l].transpose();
    z.rowwise() += biases_[l].transpose();
    h = l + 1 < n_layers() ? relu(std::move(z)) : std::move(z);
  }
  return h;
}

Vector Mlp::forward_one(const Vector& x) const {
  Matrix row(1, x.size());
  row.row(0) = x.transpose();
  return forward(row).row(0).transpose();
}

Mlp make_pose_mlp(std::uint64_t seed) {
  return Mlp::init(pose_mlp_widths(), seed);
}

double mse_loss(const Matrix& predicted, const Matrix& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols() ||
      predicted.rows() == 0) {
    throw InvariantError("mse_loss: shape mismatch or empty batch");
  }
  return (predicted - target).squaredNorm() /
         static_cast<double>(predicted.size());
}

Gradients backward(const Mlp& model, const Matrix& x, const Matrix& y) {
  if (x.rows() == 0 || x.rows() != y.rows() ||
      x.cols() != model.input_size() || y.cols() != model.output_size()) {
    throw InvariantError("backward: shape mismatch or empty batch");
  }
  const int n_layers = model.n_layers();

  // Forward pass keeping activations; activations[l] feeds layer l.
  std::vector<Matrix> activations;
  activations.reserve(static_cast<std::size_t>(n_layers) + 1);
  activations.push_back(x);
  for (int l = 0; l < n_layers; ++l) {
    Matrix z = activations.back() * model.weights()[l].transpose();
    z.rowwise() += model.biases()[l].transpose();
    activations.push_back(l + 1 < n_layers ? relu(std::move(z))
                                           : std::move(z));
  }

  Gradients g;
  g.weights.resize(static_cast<std::size_t>(n_layers));
  g.biases.resize(static_cast<std::size_t>(n_layers));

  // dL/dz at the output for L = sum((pred-y)^2) / (batch * outputs).
  Matrix delta = 2.0 * (activations.back() - y) /
                 static_cast<double>(activations.back().size());
  for (int l = n_layers - 1; l >= 0; --l) {
    g.weights[l] = delta.transpose() * activations[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = delta * model.weights()[l];
      // ReLU gate: activation > 0 iff pre-activation > 0 (0 maps to 0).
      delta.array() *= (activations[l].array() > 0.0).cast<double>();
    }
  }
  return g;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || batch_size < 1 || epochs < 1 ||
      !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(adam_epsilon > 0.0)) {
    throw ConfigError("train: bad hyperparameters");
  }
}

TrainReport train(Mlp& model, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_test, const Matrix& y_test,
                  const TrainConfig& config) {
  config.validate();
  if (x_train.rows() == 0 || x_train.rows() != y_train.rows()) {
    throw ConfigError("train: empty or mismatched training tensors");
  }
  const auto n = static_cast<int>(x_train.rows());
  const int n_layers = model.n_layers();

  std::vector<Matrix> m_w(n_layers), v_w(n_layers);
  std::vector<Vector> m_b(n_layers), v_b(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    m_w[l] = Matrix::Zero(model.weights()[l].rows(), model.weights()[l].cols());
    v_w[l] = m_w[l];
    m_b[l] = Vector::Zero(model.biases()[l].size());
    v_b[l] = m_b[l];
  }

  TrainReport report;
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t> order = rng::shuffled_indices(
        static_cast<std::size_t>(n),
        rng::mix(config.shuffle_seed, 0x5470u,
                 static_cast<std::uint64_t>(epoch)));

    double epoch_loss_sum = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int bsz = std::min(config.batch_size, n - start);
      Matrix xb(bsz, x_train.cols());
      Matrix yb(bsz, y_train.cols());
      for (int i = 0; i < bsz; ++i) {
        const auto src = static_cast<Eigen::Index>(
            order[static_cast<std::size_t>(start + i)]);
        xb.row(i) = x_train.row(src);
        yb.row(i) = y_train.row(src);
      }

      const double loss = mse_loss(model.forward(xb), yb);
      if (!std::isfinite(loss)) {
        throw ConfigError(
            "train: loss became non-finite at epoch " +
            std::to_string(epoch + 1) +
            "; check the learning rate and input scaling");
      }
      epoch_loss_sum += loss * bsz;

      const Gradients g = backward(model, xb, yb);
      ++step;
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (int l = 0; l < n_layers; ++l) {
        m_w[l] = config.beta1 * m_w[l] + (1.0 - config.beta1) * g.weights[l];
        v_w[l] = config.beta2 * v_w[l].array().matrix() +
                 (1.0 - config.beta2) * g.weights[l].array().square().matrix();
        model.weights()[l].array() -=
            config.learning_rate * (m_w[l].array() / bc1) /
            ((v_w[l].array() / bc2).sqrt() + config.adam_epsilon);

        m_b[l] = config.beta1 * m_b[l] + (1.0 - config.beta1) * g.biases[l];
        v_b[l] = config.beta2 * v_b[l].array().matrix() +
                 (1.0 - config.beta2) * g.biases[l].array().square().matrix();
        model.biases()[l].array() -=
            config.learning_rate * (m_b[l].array() / bc1) /
            ((v_b[l].array() / bc2).sqrt() + config.adam_epsilon);
      }
    }
    report.epoch_loss.push_back(epoch_loss_sum / n);
  }

  if (x_test.rows() > 0) {
    report.final_test_loss = mse_loss(model.forward(x_test), y_test);
    if (!std::isfinite(report.final_test_loss)) {
      throw ConfigError("train: test loss non-finite");
    }
  }
  return report;
}

EvalResult evaluate(const Mlp& model, const Matrix& x_test,
                    const Matrix& y_test, const Standardizer& standardizer) {
  if (x_test.rows() == 0) {
    throw ConfigError("evaluate: empty test tensors");
  }
  EvalResult r;
  const Matrix raw_pred = model.forward(x_test);
  r.test_loss = mse_loss(raw_pred, y_test);
  r.predicted = standardizer.to_output_units(raw_pred);
  r.actual = standardizer.to_output_units(y_test);
  for (int a = 0; a < kNumAxes; ++a) {
    r.per_axis[static_cast<std::size_t>(a)] =
        error_stats(r.predicted.col(a), r.actual.col(a));
  }
  return r;
}

namespace {

void write_hex_row(std::ostream& out, const double* data, Eigen::Index n) {
  char buf[40];
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%a", data[i]);
    out << (i ? " " : "") << buf;
  }
  out << '\n';
}

std::vector<double> parse_hex_row(const std::string& line, Eigen::Index n,
                                  const std::string& path) {
  std::vector<double> vals;
  const char* p = line.c_str();
  char* end = nullptr;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::strtod(p, &end);
    if (end == p) {
      throw ParseError("checkpoint " + path + ": short parameter row");
    }
    vals.push_back(v);
    p = end;
  }
  while (*p == ' ' || *p == '\t') ++p;
  if (*p != '\0') {
    throw ParseError("checkpoint " + path + ": trailing data in row");
  }
  return vals;
}

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("checkpoint " + path + ": truncated file");
  }
  return line;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  if (!ckpt.model.finite()) {
    throw InvariantError("checkpoint: refusing to save non-finite model");
  }
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open for writing: " + path);
  }
  out << "proprio-mlp 1\n";
  out << "widths";
  for (int w : ckpt.model.widths()) out << ' ' << w;
  out << '\n';
  out << "seed " << ckpt.seed << '\n';
  out << "target_scale " << target_scale_name(ckpt.standardizer.target_scale)
      << '\n';
  out << "mean\n";
  write_hex_row(out, ckpt.standardizer.mean.data(),
                ckpt.standardizer.mean.size());
  out << "stddev\n";
  write_hex_row(out, ckpt.standardizer.stddev.data(),
                ckpt.standardizer.stddev.size());
  for (int l = 0; l < ckpt.model.n_layers(); ++l) {
    const Matrix& w = ckpt.model.weights()[l];
    out << "layer " << l << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      // Matrix rows are not contiguous in column-major storage; stage them.
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        row[static_cast<std::size_t>(c)] = w(r, c);
      }
      write_hex_row(out, row.data(), w.cols());
    }
    out << "bias " << l << '\n';
    write_hex_row(out, ckpt.model.biases()[l].data(),
                  ckpt.model.biases()[l].size());
  }
  if (!out) {
    throw ConfigError("write failed: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open for reading: " + path);
  }
  if (expect_line(in, path) != "proprio-mlp 1") {
    throw ParseError("checkpoint " + path + ": bad magic line");
  }

  std::istringstream widths_line(expect_line(in, path));
  std::string tag;
  widths_line >> tag;
  if (tag != "widths") {
    throw ParseError("checkpoint " + path + ": expected widths");
  }
  std::vector<int> widths;
  int w = 0;
  while (widths_line >> w) widths.push_back(w);
  if (widths.size() < 2) {
    throw ParseError("checkpoint " + path + ": bad widths");
  }

  Checkpoint ckpt;
  std::istringstream seed_line(expect_line(in, path));
  seed_line >> tag >> ckpt.seed;
  if (tag != "seed" || seed_line.fail()) {
    throw ParseError("checkpoint " + path + ": expected seed");
  }

  std::istringstream scale_line(expect_line(in, path));
  std::string scale_name;
  scale_line >> tag >> scale_name;
  if (tag != "target_scale") {
    throw ParseError("checkpoint " + path + ": expected target_scale");
  }
  if (scale_name == target_scale_name(TargetScale::kPaperRaw)) {
    ckpt.standardizer.target_scale = TargetScale::kPaperRaw;
  } else if (scale_name == target_scale_name(TargetScale::kRadiansMeters)) {
    ckpt.standardizer.target_scale = TargetScale::kRadiansMeters;
  } else {
    throw ParseError("checkpoint " + path + ": unknown target scale");
  }
  if (widths.front() != kNumSensors) {
    throw ParseError("checkpoint " + path + ": input width mismatch");
  }

  if (expect_line(in, path) != "mean") {
    throw ParseError("checkpoint " + path + ": expected mean");
  }
  std::vector<double> mean =
      parse_hex_row(expect_line(in, path), kNumSensors, path);
  if (expect_line(in, path) != "stddev") {
    throw ParseError("checkpoint " + path + ": expected stddev");
  }
  std::vector<double> stddev =
      parse_hex_row(expect_line(in, path), kNumSensors, path);
  for (int i = 0; i < kNumSensors; ++i) {
    ckpt.standardizer.mean[i] = mean[static_cast<std::size_t>(i)];
    ckpt.standardizer.stddev[i] = stddev[static_cast<std::size_t>(i)];
    if (!(ckpt.standardizer.stddev[i] > 0.0)) {
      throw ParseError("checkpoint " + path + ": nonpositive stddev");
    }
  }

  ckpt.model = Mlp(widths);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    std::istringstream layer_line(expect_line(in, path));
    int idx = -1;
    layer_line >> tag >> idx;
    if (tag != "layer" || idx != static_cast<int>(l)) {
      throw ParseError("checkpoint " + path + ": expected layer " +
                       std::to_string(l));
    }
    Matrix& wm = ckpt.model.weights()[l];
    for (Eigen::Index r = 0; r < wm.rows(); ++r) {
      const std::vector<double> row =
          parse_hex_row(expect_line(in, path), wm.cols(), path);
      for (Eigen::Index c = 0; c < wm.cols(); ++c) {
        wm(r, c) = row[static_cast<std::size_t>(c)];
      }
    }
    std::istringstream bias_line(expect_line(in, path));
    bias_line >> tag >> idx;
    if (tag != "bias" || idx != static_cast<int>(l)) {
      throw ParseError("checkpoint " + path + ": expected bias " +
                       std::to_string(l));
    }
    const std::vector<double> bias = parse_hex_row(
        expect_line(in, path), ckpt.model.biases()[l].size(), path);
    for (Eigen::Index i = 0; i < ckpt.model.biases()[l].size(); ++i) {
      ckpt.model.biases()[l][i] = bias[static_cast<std::size_t>(i)];
    }
  }
  if (!ckpt.model.finite()) {
    throw ParseError("checkpoint " + path + ": non-finite parameters");
  }
  return ckpt;
}

}  // namespace proprio
