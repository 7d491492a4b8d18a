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

#ifndef PROPRIO_MLP_HPP_
#define PROPRIO_MLP_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "proprio/common.hpp"
#include "proprio/dataset.hpp"
#include "proprio/stats.hpp"

namespace proprio {

// Plain fully connected net: ReLU on hidden layers, identity output.
// Matrices hold one sample per row throughout.
class Mlp {
 public:
  // Zero-parameter network of the given layer widths.
  explicit Mlp(std::vector<int> widths);

  // Balanced-variance init: weights uniform in +-sqrt(6/(fan_in+fan_out)),
  // drawn row-major per layer from the seed; biases zero.
  static Mlp init(std::vector<int> widths, std::uint64_t seed);

  const std::vector<int>& widths() const { return widths_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  int n_layers() const { return static_cast<int>(weights_.size()); }

  // weights()[l] has shape widths[l+1] x widths[l].
  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Vector>& biases() const { return biases_; }

  std::size_t parameter_count() const;
  bool finite() const;

  // x is n x input_size; returns n x output_size.
  Matrix forward(const Matrix& x) const;
  Vector forward_one(const Vector& x) const;

 private:
  std::vector<int> widths_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

// The pose estimator: 60 standardized channels in, 6-DOF pose out.
inline const std::vector<int>& pose_mlp_widths() {
  static const std::vector<int> w{kNumSensors, 128, 64, 32, kNumAxes};
  return w;
}

Mlp make_pose_mlp(std::uint64_t seed);

// Mean over batch and over outputs of the squared residual.
double mse_loss(const Matrix& predicted, const Matrix& target);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// Exact gradients of mse_loss with respect to every parameter.
// ReLU subgradient at 0 is 0.
Gradients backward(const Mlp& model, const Matrix& x, const Matrix& y);

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 32;
  int epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean training loss per epoch
  double final_test_loss = 0.0;    // 0 when no test rows were given
};

// Minibatch Adam with bias correction. Shuffles the training rows every
// epoch from the seed and keeps the final partial batch. Throws ConfigError
// when the loss leaves the finite range (stepsize/scale misconfiguration).
TrainReport train(Mlp& model, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_test, const Matrix& y_test,
                  const TrainConfig& config);

struct EvalResult {
  Matrix predicted;  // output units: meters and degrees
  Matrix actual;
  std::array<ErrorStats, kNumAxes> per_axis;
  double test_loss = 0.0;  // training-space MSE
};

// Runs the model on standardized inputs and reports errors in output units
// (meters, degrees) regardless of the target mode used in training.
EvalResult evaluate(const Mlp& model, const Matrix& x_test,
                    const Matrix& y_test, const Standardizer& standardizer);

extern const char* const kAxisNames[kNumAxes];

// Trained model plus everything needed to feed it raw counts later.
struct Checkpoint {
  Mlp model{std::vector<int>{1, 1}};
  Standardizer standardizer;
  std::uint64_t seed = 0;  // master seed of the producing run
};

// Text format with hexfloat parameters: exact round-trip.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace proprio

#endif  // PROPRIO_MLP_HPP_
