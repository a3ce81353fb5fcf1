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

#include "macer/statmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace macer::statmath {
namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

// Acklam's rational approximation on the lower half, p in (0, 0.5].
// Relative error about 1.15e-9 before refinement.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double quantile_lower_half(double p) {
  double x = acklam_lower(p);
  // One Newton step on Phi(x) - p; Phi via erfc keeps the tail accurate.
  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  x -= err / std_normal_pdf(x);
  return x;
}

double log_binomial_term(std::int64_t n, std::int64_t i, double log_p, double log_q) {
  const auto dn = static_cast<double>(n);
  const auto di = static_cast<double>(i);
  return std::lgamma(dn + 1.0) - std::lgamma(di + 1.0) - std::lgamma(dn - di + 1.0) + di * log_p +
         (dn - di) * log_q;
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
  require(std::isfinite(x), "std_normal_cdf: input must be finite");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double clamp_probability(double p) { return std::clamp(p, kQuantileClamp, 1.0 - kQuantileClamp); }

double std_normal_quantile(double p) {
  require(!std::isnan(p), "std_normal_quantile: NaN input");
  require(p >= 0.0 && p <= 1.0, "std_normal_quantile: p outside [0, 1]");
  p = clamp_probability(p);
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p in [0.5, 1], so the upper half reuses the lower.
  return p < 0.5 ? quantile_lower_half(p) : -quantile_lower_half(1.0 - p);
}

double std_normal_quantile_derivative(double p) {
  return 1.0 / std_normal_pdf(std_normal_quantile(p));
}

double binomial_upper_tail(std::int64_t successes, std::int64_t trials, double p) {
  require(trials >= 0, "binomial_upper_tail: trials must be non-negative");
  if (successes <= 0) return 1.0;
  if (successes > trials) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds = p / (1.0 - p);
  const auto n = trials;
  const auto mean = static_cast<double>(n) * p;

  // Sum whichever side does not contain the bulk of the mass; terms fall off
  // monotonically away from the mode, so truncation is safe.
  if (static_cast<double>(successes) > mean) {
    double term = std::exp(log_binomial_term(n, successes, log_p, log_q));
    double sum = 0.0;
    for (std::int64_t i = successes; i <= n; ++i) {
      sum += term;
      if (term <= 1e-18 * sum) break;
      term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
    }
    return std::min(sum, 1.0);
  }
  double term = std::exp(log_binomial_term(n, successes - 1, log_p, log_q));
  double lower = 0.0;
  for (std::int64_t i = successes - 1; i >= 0; --i) {
    lower += term;
    if (term <= 1e-18 * lower) break;
    term *= static_cast<double>(i) / static_cast<double>(n - i + 1) / odds;
  }
  return std::max(0.0, 1.0 - lower);
}

double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double alpha) {
  require(trials >= 1, "clopper_pearson_lower: trials must be >= 1");
  require(successes >= 0 && successes <= trials,
          "clopper_pearson_lower: successes must lie in [0, trials]");
  require(alpha > 0.0 && alpha <= 1.0, "clopper_pearson_lower: alpha must lie in (0, 1]");
  if (successes == 0) return 0.0;

  // P(X >= s | p) is increasing in p; find where it crosses alpha.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_upper_tail(successes, trials, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double hoeffding_lower(double sample_mean, std::int64_t k, double alpha) {
  require(k >= 1, "hoeffding_lower: k must be >= 1");
  require(sample_mean >= -1e-12 && sample_mean <= 1.0 + 1e-12,
          "hoeffding_lower: sample_mean must lie in [0, 1]");
  require(alpha > 0.0 && alpha <= 1.0, "hoeffding_lower: alpha must lie in (0, 1]");
  return sample_mean - std::sqrt(-std::log(alpha) / (2.0 * static_cast<double>(k)));
}

double bernstein_lower(double sample_mean, double sample_variance, std::int64_t k, double alpha) {
  require(k >= 2, "bernstein_lower: k must be >= 2 (sample variance undefined)");
  require(sample_mean >= -1e-12 && sample_mean <= 1.0 + 1e-12,
          "bernstein_lower: sample_mean must lie in [0, 1]");
  require(sample_variance >= -1e-12, "bernstein_lower: sample_variance must be >= 0");
  require(alpha > 0.0 && alpha <= 2.0, "bernstein_lower: alpha must lie in (0, 2]");
  const double log_term = std::log(2.0 / alpha);
  const auto dk = static_cast<double>(k);
  const double variance = std::max(sample_variance, 0.0);
  return sample_mean - std::sqrt(2.0 * variance * log_term / dk) -
         7.0 * log_term / (3.0 * (dk - 1.0));
}

double sample_variance_from_sums(double sum, double sum_sq, std::int64_t k) {
  require(k >= 2, "sample_variance_from_sums: k must be >= 2");
  const auto dk = static_cast<double>(k);
  return std::max(0.0, (sum_sq - sum * sum / dk) / (dk - 1.0));
}

std::vector<double> sample_gaussian(std::size_t dim, double sigma, RngStream& rng) {
  require(dim >= 1, "sample_gaussian: dim must be >= 1");
  std::vector<double> out(dim);
  fill_gaussian(out, sigma, rng);
  return out;
}

void fill_gaussian(std::span<double> out, double sigma, RngStream& rng) {
  require(sigma > 0.0 && std::isfinite(sigma), "sample_gaussian: sigma must be positive");
  for (double& v : out) v = sigma * rng.normal();
}

}  // namespace macer::statmath
