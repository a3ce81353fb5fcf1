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
#include <optional>
#include <utility>

#include "macer/net.hpp"
#include "macer/rng.hpp"

namespace macer {

/// Objective hyperparameters in effect at one training step.
struct LossParams {
  double sigma = 0.25;
  double lambda = 12.0;
  double gamma = 8.0;
  /// Inverse temperature of the likelihoods feeding the robustness term.
  double beta = 16.0;
  /// Inverse temperature for the cross-entropy term. Equal to beta unless the
  /// large temperature is restricted to the robustness term.
  double ce_beta = 16.0;
};

inline constexpr double kProbabilityFloor = 1e-12;

struct LossBreakdown {
  double total = 0.0;
  double classification = 0.0;
  double robustness = 0.0;
  std::optional<double> xi_hat;
  bool in_correct_set = false;
};

/// Noisy copies x + sigma * eta_j as columns; eta_j comes from
/// rng.substream(j), so each (sample, j) pair owns its own stream.
Matrix noisy_copies(const Vector& x, int k, double sigma, const RngStream& rng);

/// Mean of softmax_temp(u(x + eta_j), beta) over j = 1..k.
Vector empirical_likelihood(const SmallNet& net, const Vector& x, int k, double sigma, double beta,
                            const RngStream& rng);

/// Phi^{-1}(zhat_y) - Phi^{-1}(zhat_runner_up), or nullopt when y is not the
/// (lowest-index) argmax of zhat.
std::optional<double> xi_hat(const Vector& zhat, int y);

/// Per-sample objective -ln zhat_y + (lambda sigma / 2) max(gamma - xi, 0),
/// the hinge applying only when y is the argmax.
LossBreakdown macer_loss(const Vector& zhat, int y, const LossParams& params);

/// As macer_loss, with the cross-entropy read from zhat_ce and the
/// membership/hinge from zhat_robust.
LossBreakdown macer_loss_split(const Vector& zhat_ce, const Vector& zhat_robust, int y,
                               const LossParams& params);

/// d(robustness term)/d(zhat). Zero outside the correct set or when the
/// hinge is saturated; quantile derivatives are taken at clamped arguments.
Vector robustness_gradient_wrt_zhat(const Vector& zhat, int y, const LossParams& params);

/// d(cross-entropy term)/d(zhat).
Vector classification_gradient_wrt_zhat(const Vector& zhat, int y);

/// Loss and parameter gradient of the per-sample objective through the
/// k-sample Monte Carlo estimate. Correct-set membership, the runner-up class
/// and the hinge gate are fixed at their values for this evaluation.
std::pair<LossBreakdown, GradientSet> macer_loss_backward(const SmallNet& net, const Vector& x,
                                                          int y, int k,
                                                          const LossParams& params,
                                                          const RngStream& rng);

}  // namespace macer
