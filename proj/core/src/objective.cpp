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

#include "macer/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "macer/statmath.hpp"

namespace macer {
namespace {

int runner_up(const Vector& zhat, int y) {
  int best = -1;
  for (int c = 0; c < zhat.size(); ++c) {
    if (c == y) continue;
    if (best < 0 || zhat(c) > zhat(best)) best = c;
  }
  return best;
}

void check_label(const Vector& zhat, int y) {
  if (y < 0 || y >= zhat.size()) throw std::domain_error("label out of range");
  if (zhat.size() < 2) throw std::domain_error("likelihood vector needs at least two classes");
}

}  // namespace

Matrix noisy_copies(const Vector& x, int k, double sigma, const RngStream& rng) {
  if (k < 1) throw std::domain_error("noise samples k must be >= 1");
  Matrix out(x.size(), k);
  for (int j = 0; j < k; ++j) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(j));
    auto col = out.col(j);
    statmath::fill_gaussian({col.data(), static_cast<std::size_t>(col.size())}, sigma, stream);
    col += x;
  }
  return out;
}

Vector empirical_likelihood(const SmallNet& net, const Vector& x, int k, double sigma, double beta,
                            const RngStream& rng) {
  const Matrix logits = forward_logits_batch(net, noisy_copies(x, k, sigma, rng));
  return softmax_temp_columns(logits, beta).rowwise().mean();
}

std::optional<double> xi_hat(const Vector& zhat, int y) {
  check_label(zhat, y);
  if (argmax_lowest(zhat) != y) return std::nullopt;
  const int other = runner_up(zhat, y);
  return statmath::std_normal_quantile(zhat(y)) - statmath::std_normal_quantile(zhat(other));
}

LossBreakdown macer_loss_split(const Vector& zhat_ce, const Vector& zhat_robust, int y,
                               const LossParams& params) {
  check_label(zhat_ce, y);
  LossBreakdown out;
  out.classification = -std::log(std::max(zhat_ce(y), kProbabilityFloor));
  out.xi_hat = xi_hat(zhat_robust, y);
  out.in_correct_set = out.xi_hat.has_value();
  if (out.in_correct_set) {
    out.robustness =
        0.5 * params.lambda * params.sigma * std::max(params.gamma - *out.xi_hat, 0.0);
  }
  out.total = out.classification + out.robustness;
  return out;
}

LossBreakdown macer_loss(const Vector& zhat, int y, const LossParams& params) {
  return macer_loss_split(zhat, zhat, y, params);
}

Vector robustness_gradient_wrt_zhat(const Vector& zhat, int y, const LossParams& params) {
  Vector grad = Vector::Zero(zhat.size());
  const auto xi = xi_hat(zhat, y);
  if (!xi || *xi >= params.gamma) return grad;
  const double scale = 0.5 * params.lambda * params.sigma;
  const int other = runner_up(zhat, y);
  grad(y) = -scale * statmath::std_normal_quantile_derivative(zhat(y));
  grad(other) = scale * statmath::std_normal_quantile_derivative(zhat(other));
  return grad;
}

Vector classification_gradient_wrt_zhat(const Vector& zhat, int y) {
  check_label(zhat, y);
  Vector grad = Vector::Zero(zhat.size());
  if (zhat(y) > kProbabilityFloor) grad(y) = -1.0 / zhat(y);
  return grad;
}

std::pair<LossBreakdown, GradientSet> macer_loss_backward(const SmallNet& net, const Vector& x,
                                                          int y, int k,
                                                          const LossParams& params,
                                                          const RngStream& rng) {
  const ForwardCache cache = forward_cached(net, noisy_copies(x, k, params.sigma, rng));
  const Matrix z_robust = softmax_temp_columns(cache.logits(), params.beta);
  const Vector zhat_robust = z_robust.rowwise().mean();
  const bool shared = params.ce_beta == params.beta;
  const Matrix z_ce = shared ? z_robust : softmax_temp_columns(cache.logits(), params.ce_beta);
  const Vector zhat_ce = shared ? zhat_robust : Vector(z_ce.rowwise().mean());

  const LossBreakdown loss = macer_loss_split(zhat_ce, zhat_robust, y, params);

  // Every noisy copy contributes 1/k of the mean likelihood.
  const double inv_k = 1.0 / static_cast<double>(k);
  const Vector g_robust = robustness_gradient_wrt_zhat(zhat_robust, y, params) * inv_k;
  const Vector g_ce = classification_gradient_wrt_zhat(zhat_ce, y) * inv_k;

  Matrix dlogits;
  if (shared) {
    dlogits = softmax_backward(z_robust, (g_robust + g_ce).replicate(1, k), params.beta);
  } else {
    dlogits = softmax_backward(z_robust, g_robust.replicate(1, k), params.beta) +
              softmax_backward(z_ce, g_ce.replicate(1, k), params.ce_beta);
  }
  return {loss, backward_from_logits(net, cache, dlogits)};
}

}  // namespace macer
