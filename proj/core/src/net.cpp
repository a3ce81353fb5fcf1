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

#include "macer/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "macer/errors.hpp"

namespace macer {
namespace {

constexpr char kMagic[] = "SMNET1";
constexpr std::size_t kMagicLen = 6;

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::domain_error("SmallNet: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw std::domain_error("SmallNet: layer dims must be positive");
  }
  if (dims.back() < 2) throw std::domain_error("SmallNet: need at least two classes");
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* field) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string("checkpoint truncated while reading ") + field);
    }
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  double f64(const char* field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string raw(std::size_t n, const char* field) {
    need(n, field);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (other.layers.size() != layers.size()) {
    throw std::domain_error("GradientSet: layer count mismatch");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

GradientSet& GradientSet::operator*=(double scale) {
  for (auto& l : layers) {
    l.weight *= scale;
    l.bias *= scale;
  }
  return *this;
}

std::vector<double> GradientSet::flatten() const {
  std::vector<double> out;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    }
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

bool GradientSet::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const LayerParams& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

SmallNet::SmallNet(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  check_dims(dims_);
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    layers_.push_back({Matrix::Zero(dims_[i + 1], dims_[i]), Vector::Zero(dims_[i + 1])});
  }
}

SmallNet SmallNet::he_uniform(std::vector<int> layer_dims, RngStream& rng) {
  SmallNet net(std::move(layer_dims));
  for (auto& l : net.layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.weight.cols()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = bound * (2.0 * rng.uniform() - 1.0);
      }
    }
  }
  return net;
}

std::size_t SmallNet::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool SmallNet::all_finite() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const LayerParams& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

std::vector<double> SmallNet::flatten() const { return GradientSet{layers_}.flatten(); }

void SmallNet::assign_flat(std::span<const double> params) {
  if (params.size() != num_parameters()) {
    throw std::domain_error("SmallNet::assign_flat: parameter count mismatch");
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = params[k++];
  }
}

GradientSet SmallNet::zeros_like() const {
  GradientSet g;
  for (const auto& l : layers_) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

bool operator==(const SmallNet& a, const SmallNet& b) {
  if (a.dims_ != b.dims_) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].weight != b.layers_[i].weight || a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

ForwardCache forward_cached(const SmallNet& net, const Matrix& inputs) {
  if (inputs.rows() != net.input_dim()) {
    throw std::domain_error("forward: input has " + std::to_string(inputs.rows()) +
                            " rows, net expects " + std::to_string(net.input_dim()));
  }
  ForwardCache cache;
  cache.activations.reserve(net.num_layers() + 1);
  cache.activations.push_back(inputs);
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& l = net.layer(i);
    Matrix z = l.weight * cache.activations.back();
    z.colwise() += l.bias;
    if (i + 1 < net.num_layers()) z = z.cwiseMax(0.0);
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

Matrix forward_logits_batch(const SmallNet& net, const Matrix& inputs) {
  if (inputs.rows() != net.input_dim()) {
    throw std::domain_error("forward: input has " + std::to_string(inputs.rows()) +
                            " rows, net expects " + std::to_string(net.input_dim()));
  }
  Matrix a = inputs;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& l = net.layer(i);
    Matrix z = l.weight * a;
    z.colwise() += l.bias;
    if (i + 1 < net.num_layers()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Vector forward_logits(const SmallNet& net, const Vector& x) {
  return forward_logits_batch(net, x);
}

Vector softmax_temp(const Vector& logits, double beta) {
  if (!(beta >= 0.0)) throw std::domain_error("softmax_temp: beta must be >= 0");
  const double top = logits.maxCoeff();
  Vector e = (beta * (logits.array() - top)).exp();
  return e / e.sum();
}

Matrix softmax_temp_columns(const Matrix& logits, double beta) {
  if (!(beta >= 0.0)) throw std::domain_error("softmax_temp: beta must be >= 0");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double top = logits.col(j).maxCoeff();
    out.col(j) = (beta * (logits.col(j).array() - top)).exp();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

int argmax_lowest(const Eigen::Ref<const Vector>& values) {
  int best = 0;
  for (Eigen::Index c = 1; c < values.size(); ++c) {
    if (values(c) > values(best)) best = static_cast<int>(c);
  }
  return best;
}

int hard_predict(const SmallNet& net, const Vector& x) {
  return argmax_lowest(forward_logits(net, x));
}

Matrix softmax_backward(const Matrix& probs, const Matrix& dloss_dprobs, double beta) {
  if (probs.rows() != dloss_dprobs.rows() || probs.cols() != dloss_dprobs.cols()) {
    throw std::domain_error("softmax_backward: shape mismatch");
  }
  // dL/du_c = beta * z_c * (g_c - sum_c' z_c' g_c')
  const Eigen::RowVectorXd inner = (probs.array() * dloss_dprobs.array()).colwise().sum();
  Matrix centered = dloss_dprobs;
  centered.rowwise() -= inner;
  return beta * (probs.array() * centered.array()).matrix();
}

GradientSet backward_from_logits(const SmallNet& net, const ForwardCache& cache,
                                 const Matrix& dloss_dlogits) {
  if (dloss_dlogits.rows() != net.num_classes() ||
      dloss_dlogits.cols() != cache.logits().cols()) {
    throw std::domain_error("backward: logit gradient shape mismatch");
  }
  GradientSet grads = net.zeros_like();
  Matrix delta = dloss_dlogits;
  for (std::size_t i = net.num_layers(); i-- > 0;) {
    const Matrix& input = cache.activations[i];
    grads.layers[i].weight.noalias() = delta * input.transpose();
    grads.layers[i].bias = delta.rowwise().sum();
    if (i > 0) {
      Matrix back = net.layer(i).weight.transpose() * delta;
      delta = (input.array() > 0.0).select(back.array(), 0.0).matrix();
    }
  }
  return grads;
}

GradientSet backward(const SmallNet& net, const Vector& x, const Vector& dloss_dprobs,
                     double beta) {
  if (dloss_dprobs.size() != net.num_classes()) {
    throw std::domain_error("backward: dloss_dprobs must have one entry per class");
  }
  const ForwardCache cache = forward_cached(net, x);
  const Matrix probs = softmax_temp_columns(cache.logits(), beta);
  return backward_from_logits(net, cache, softmax_backward(probs, dloss_dprobs, beta));
}

void sgd_step(SmallNet& net, const GradientSet& grads, double lr, double momentum,
              GradientSet& velocity) {
  if (!(lr > 0.0)) throw std::domain_error("sgd_step: lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::domain_error("sgd_step: momentum must lie in [0, 1)");
  }
  if (velocity.layers.empty()) velocity = net.zeros_like();
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    auto& v = velocity.layers[i];
    const auto& g = grads.layers.at(i);
    v.weight = momentum * v.weight + g.weight;
    v.bias = momentum * v.bias + g.bias;
    net.layer(i).weight -= lr * v.weight;
    net.layer(i).bias -= lr * v.bias;
  }
}

std::string serialize_checkpoint(const SmallNet& net) {
  std::string out(kMagic, kMagicLen);
  put_u32(out, static_cast<std::uint32_t>(net.layer_dims().size()));
  for (int d : net.layer_dims()) put_u32(out, static_cast<std::uint32_t>(d));
  for (double v : net.flatten()) put_f64(out, v);
  return out;
}

SmallNet deserialize_checkpoint(const std::string& bytes) {
  ByteReader in(bytes);
  if (in.raw(kMagicLen, "magic") != std::string(kMagic, kMagicLen)) {
    throw FormatError("checkpoint: bad magic (expected SMNET1)");
  }
  const std::uint32_t count = in.u32("layer count");
  if (count < 2 || count > 64) throw FormatError("checkpoint: implausible layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t d = in.u32("layer dims");
    if (d == 0 || d > (1U << 24)) throw FormatError("checkpoint: invalid layer dim");
    dims.push_back(static_cast<int>(d));
  }
  if (dims.back() < 2) throw FormatError("checkpoint: fewer than two classes");
  SmallNet net(dims);
  std::vector<double> params(net.num_parameters());
  for (double& p : params) p = in.f64("parameters");
  if (!in.at_end()) throw FormatError("checkpoint: trailing bytes after parameters");
  net.assign_flat(params);
  if (!net.all_finite()) throw FormatError("checkpoint: non-finite parameter");
  return net;
}

void save_checkpoint(const SmallNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_checkpoint(net);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

SmallNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace macer
