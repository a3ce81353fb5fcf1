// Copyright 2026 The macer-desk Authors
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "macer/rng.hpp"

namespace macer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Weight is (fan_out x fan_in), so a layer maps column inputs as W x + b.
struct LayerParams {
  Matrix weight;
  Vector bias;
};

/// Gradients (or optimizer state) with the same shapes as a SmallNet.
struct GradientSet {
  std::vector<LayerParams> layers;

  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double scale);
  std::vector<double> flatten() const;
  bool all_finite() const;
};

/// Feedforward classifier: affine layers with ReLU between them and raw
/// logits at the output. Layer shapes are fixed at construction.
class SmallNet {
 public:
  SmallNet() = default;
  /// All-zero parameters. layer_dims = {input, hidden..., classes}; needs at
  /// least two entries and classes >= 2.
  explicit SmallNet(std::vector<int> layer_dims);

  /// Uniform He-style init: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b = 0.
  static SmallNet he_uniform(std::vector<int> layer_dims, RngStream& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int num_classes() const { return dims_.back(); }
  std::size_t num_layers() const { return layers_.size(); }

  const std::vector<LayerParams>& layers() const { return layers_; }
  LayerParams& layer(std::size_t i) { return layers_.at(i); }
  const LayerParams& layer(std::size_t i) const { return layers_.at(i); }

  std::size_t num_parameters() const;
  bool all_finite() const;

  /// Parameters in checkpoint order: per layer, weight row-major then bias.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> params);

  GradientSet zeros_like() const;

  friend bool operator==(const SmallNet& a, const SmallNet& b);

 private:
  std::vector<int> dims_;
  std::vector<LayerParams> layers_;
};

/// Post-activation values for every layer of a batched forward pass.
/// activations[0] is the input batch, activations.back() the logits.
struct ForwardCache {
  std::vector<Matrix> activations;
  const Matrix& logits() const { return activations.back(); }
};

Vector forward_logits(const SmallNet& net, const Vector& x);
/// Column-batched forward pass: inputs is (input_dim x m).
Matrix forward_logits_batch(const SmallNet& net, const Matrix& inputs);
ForwardCache forward_cached(const SmallNet& net, const Matrix& inputs);

/// z^c = exp(beta u^c) / sum_c' exp(beta u^c'), stabilized by subtracting
/// the max logit. beta must be >= 0.
Vector softmax_temp(const Vector& logits, double beta);
/// Column-wise softmax_temp.
Matrix softmax_temp_columns(const Matrix& logits, double beta);

/// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(const Eigen::Ref<const Vector>& values);
int hard_predict(const SmallNet& net, const Vector& x);

/// Pulls dL/dz back through z = softmax(beta u): returns dL/du per column.
Matrix softmax_backward(const Matrix& probs, const Matrix& dloss_dprobs, double beta);

/// Reverse-mode pass from logit gradients; contributions of all batch
/// columns are summed.
GradientSet backward_from_logits(const SmallNet& net, const ForwardCache& cache,
                                 const Matrix& dloss_dlogits);

/// Gradient of <dloss_dprobs, softmax_temp(forward_logits(net, x), beta)>
/// with respect to every parameter.
GradientSet backward(const SmallNet& net, const Vector& x, const Vector& dloss_dprobs,
                     double beta);

/// Classic momentum SGD: v <- momentum * v + g; theta <- theta - lr * v.
void sgd_step(SmallNet& net, const GradientSet& grads, double lr, double momentum,
              GradientSet& velocity);

/// Checkpoint layout (little-endian): "SMNET1", u32 number of layer dims,
/// u32 per dim, then per layer the weight matrix row-major and the bias as
/// IEEE-754 doubles.
std::string serialize_checkpoint(const SmallNet& net);
SmallNet deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const SmallNet& net, const std::filesystem::path& path);
SmallNet load_checkpoint(const std::filesystem::path& path);

}  // namespace macer
