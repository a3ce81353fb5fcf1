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
#include <functional>
#include <string_view>
#include <vector>

#include "macer/net.hpp"
#include "macer/rng.hpp"

namespace macer {

enum class BoundKind { kClopperPearson, kHoeffding, kBernstein };

std::string_view to_string(BoundKind kind);
/// Accepts "clopper_pearson", "hoeffding", "bernstein".
bool parse_bound_kind(std::string_view text, BoundKind& out);

struct CertifyConfig {
  double sigma = 0.25;
  std::int64_t n0 = 100;
  std::int64_t n = 10000;
  double alpha = 0.001;
  BoundKind bound = BoundKind::kClopperPearson;
  /// Inverse temperature; only used by the soft bounds.
  double beta = 16.0;

  /// Throws std::domain_error naming the offending field.
  void validate() const;
};

inline constexpr int kAbstain = -1;

struct CertificationResult {
  int prediction = kAbstain;
  double radius = 0.0;
  BoundKind bound = BoundKind::kClopperPearson;
  /// The lower confidence bound on the top-class probability (p_A or z_A).
  double lower_bound = 0.0;

  bool abstained() const { return prediction == kAbstain; }
};

/// Per-class sums of z and z^2 over `num` noisy evaluations.
struct MomentMatrix {
  Vector first;
  Vector second;
  std::int64_t num = 0;
};

/// (sigma / 2) (Phi^{-1}(pA) - Phi^{-1}(pB)) with clamped quantiles.
double hard_radius_from_probs(double p_a, double p_b, double sigma);
/// Same formula on expected likelihoods of the soft smoothed classifier.
double soft_radius_from_expectations(double z_y, double z_runner_up, double sigma);

/// Evaluates the net on x + eta_j, eta_j ~ N(0, sigma^2 I), j = 1..num, and
/// hands the logits to `visit` in column batches. Noise is drawn column by
/// column from `rng`, so the realizations do not depend on the batch size.
void for_each_noisy_logits(const SmallNet& net, const Vector& x, std::int64_t num, double sigma,
                           RngStream& rng, const std::function<void(const Matrix&)>& visit);

/// Hard-prediction counts per class over num noisy copies of x.
std::vector<std::int64_t> count_votes(const SmallNet& net, const Vector& x, std::int64_t num,
                                      double sigma, RngStream& rng);

MomentMatrix sample_under_noise(const SmallNet& net, const Vector& x, std::int64_t num,
                                double sigma, double beta, RngStream& rng);

/// Two-stage Monte Carlo certification of the vote-smoothed classifier with a
/// Clopper-Pearson bound. Selection uses rng.substream(0), estimation
/// rng.substream(1).
CertificationResult hard_certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                                 RngStream& rng);

/// Two-stage certification of the expectation-smoothed classifier with a
/// Hoeffding or empirical Bernstein bound. Stage streams as in hard_certify.
CertificationResult soft_certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                                 RngStream& rng);

/// Dispatches on cfg.bound.
CertificationResult certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                            RngStream& rng);

enum class SmoothingMode { kHard, kSoft };

/// Majority vote (kHard) or argmax of the mean likelihood (kSoft) over n
/// noisy samples. No abstention.
int smoothed_predict(const SmallNet& net, const Vector& x, double sigma, std::int64_t n,
                     double beta, SmoothingMode mode, RngStream& rng);

}  // namespace macer
