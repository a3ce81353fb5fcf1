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

#include "macer/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "macer/statmath.hpp"

namespace macer {
namespace {

constexpr std::int64_t kNoiseBatch = 256;

int argmax_counts(const std::vector<std::int64_t>& counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

CertificationResult finish(int top_class, double lower_bound, const CertifyConfig& cfg) {
  CertificationResult r;
  r.bound = cfg.bound;
  r.lower_bound = lower_bound;
  if (lower_bound > 0.5) {
    r.prediction = top_class;
    r.radius = cfg.sigma * statmath::std_normal_quantile(lower_bound);
  }
  return r;
}

}  // namespace

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kClopperPearson:
      return "clopper_pearson";
    case BoundKind::kHoeffding:
      return "hoeffding";
    case BoundKind::kBernstein:
      return "bernstein";
  }
  return "unknown";
}

bool parse_bound_kind(std::string_view text, BoundKind& out) {
  for (auto k : {BoundKind::kClopperPearson, BoundKind::kHoeffding, BoundKind::kBernstein}) {
    if (text == to_string(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

void CertifyConfig::validate() const {
  if (!(sigma > 0.0)) throw std::domain_error("certify.sigma must be positive");
  if (n0 < 1) throw std::domain_error("certify.n0 must be >= 1");
  if (n < 2) throw std::domain_error("certify.n must be >= 2 (sample variance needs two samples)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("certify.alpha must lie in (0, 1]");
  if (!(beta >= 0.0)) throw std::domain_error("certify.beta must be >= 0");
}

double hard_radius_from_probs(double p_a, double p_b, double sigma) {
  if (p_a < p_b) throw std::domain_error("hard_radius_from_probs: pA < pB");
  if (!(sigma > 0.0)) throw std::domain_error("hard_radius_from_probs: sigma must be positive");
  const double gap = statmath::std_normal_quantile(p_a) - statmath::std_normal_quantile(p_b);
  return std::max(0.0, 0.5 * sigma * gap);
}

double soft_radius_from_expectations(double z_y, double z_runner_up, double sigma) {
  if (z_y < z_runner_up) throw std::domain_error("soft_radius_from_expectations: zy < z_runner");
  return hard_radius_from_probs(z_y, z_runner_up, sigma);
}

void for_each_noisy_logits(const SmallNet& net, const Vector& x, std::int64_t num, double sigma,
                           RngStream& rng, const std::function<void(const Matrix&)>& visit) {
  if (x.size() != net.input_dim()) throw std::domain_error("noisy evaluation: input dim mismatch");
  if (num < 1) throw std::domain_error("noisy evaluation: num must be >= 1");
  Matrix batch;
  for (std::int64_t done = 0; done < num; done += kNoiseBatch) {
    const auto cols = static_cast<Eigen::Index>(std::min(kNoiseBatch, num - done));
    batch.resize(x.size(), cols);
    statmath::fill_gaussian({batch.data(), static_cast<std::size_t>(batch.size())}, sigma, rng);
    batch.colwise() += x;
    visit(forward_logits_batch(net, batch));
  }
}

std::vector<std::int64_t> count_votes(const SmallNet& net, const Vector& x, std::int64_t num,
                                      double sigma, RngStream& rng) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(net.num_classes()), 0);
  for_each_noisy_logits(net, x, num, sigma, rng, [&](const Matrix& logits) {
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      ++counts[static_cast<std::size_t>(argmax_lowest(logits.col(j)))];
    }
  });
  return counts;
}

MomentMatrix sample_under_noise(const SmallNet& net, const Vector& x, std::int64_t num,
                                double sigma, double beta, RngStream& rng) {
  MomentMatrix m{Vector::Zero(net.num_classes()), Vector::Zero(net.num_classes()), num};
  for_each_noisy_logits(net, x, num, sigma, rng, [&](const Matrix& logits) {
    const Matrix z = softmax_temp_columns(logits, beta);
    m.first += z.rowwise().sum();
    m.second += z.array().square().matrix().rowwise().sum();
  });
  return m;
}

CertificationResult hard_certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                                 RngStream& rng) {
  cfg.validate();
  if (cfg.bound != BoundKind::kClopperPearson) {
    throw std::domain_error("hard_certify: requires the clopper_pearson bound");
  }
  RngStream select_rng = rng.substream(0);
  RngStream estimate_rng = rng.substream(1);
  const int top = argmax_counts(count_votes(net, x, cfg.n0, cfg.sigma, select_rng));
  const auto counts = count_votes(net, x, cfg.n, cfg.sigma, estimate_rng);
  const double p_lower =
      statmath::clopper_pearson_lower(counts[static_cast<std::size_t>(top)], cfg.n, cfg.alpha);
  return finish(top, p_lower, cfg);
}

CertificationResult soft_certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                                 RngStream& rng) {
  cfg.validate();
  if (cfg.bound == BoundKind::kClopperPearson) {
    throw std::domain_error("soft_certify: requires the hoeffding or bernstein bound");
  }
  RngStream select_rng = rng.substream(0);
  RngStream estimate_rng = rng.substream(1);
  const MomentMatrix selection = sample_under_noise(net, x, cfg.n0, cfg.sigma, cfg.beta, select_rng);
  const int top = argmax_lowest(selection.first);
  const MomentMatrix est = sample_under_noise(net, x, cfg.n, cfg.sigma, cfg.beta, estimate_rng);

  const double sum = est.first(top);
  const double mean = std::clamp(sum / static_cast<double>(cfg.n), 0.0, 1.0);
  double lower = 0.0;
  if (cfg.bound == BoundKind::kHoeffding) {
    lower = statmath::hoeffding_lower(mean, cfg.n, cfg.alpha);
  } else {
    const double var = statmath::sample_variance_from_sums(sum, est.second(top), cfg.n);
    lower = statmath::bernstein_lower(mean, var, cfg.n, cfg.alpha);
  }
  return finish(top, std::clamp(lower, 0.0, 1.0), cfg);
}

CertificationResult certify(const SmallNet& net, const Vector& x, const CertifyConfig& cfg,
                            RngStream& rng) {
  return cfg.bound == BoundKind::kClopperPearson ? hard_certify(net, x, cfg, rng)
                                                 : soft_certify(net, x, cfg, rng);
}

int smoothed_predict(const SmallNet& net, const Vector& x, double sigma, std::int64_t n,
                     double beta, SmoothingMode mode, RngStream& rng) {
  if (n < 1) throw std::domain_error("smoothed_predict: n must be >= 1");
  if (mode == SmoothingMode::kHard) return argmax_counts(count_votes(net, x, n, sigma, rng));
  return argmax_lowest(sample_under_noise(net, x, n, sigma, beta, rng).first);
}

}  // namespace macer
