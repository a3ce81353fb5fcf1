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
#include <span>
#include <vector>

#include "macer/rng.hpp"

/// Gaussian CDF/quantile numerics and the one-sided lower confidence bounds
/// used by certification.
///
/// All functions are pure and thread-safe. Precondition violations raise
/// std::domain_error.
namespace macer::statmath {

/// Quantile arguments are clamped into [kQuantileClamp, 1 - kQuantileClamp]
/// before inversion, which keeps |quantile| below ~6.
inline constexpr double kQuantileClamp = 1e-9;

double std_normal_pdf(double x);

/// Phi(x). Throws on non-finite input.
double std_normal_cdf(double x);

double clamp_probability(double p);

/// Phi^{-1}(clamp(p)). Rational approximation polished by one Newton step.
/// Throws on NaN or p outside [0, 1].
double std_normal_quantile(double p);

/// d/dp Phi^{-1}(p) evaluated at the clamped argument, i.e.
/// 1 / phi(Phi^{-1}(clamp(p))).
double std_normal_quantile_derivative(double p);

/// P(X >= successes) for X ~ Binomial(trials, p).
double binomial_upper_tail(std::int64_t successes, std::int64_t trials, double p);

/// Exact one-sided (1 - alpha) lower confidence bound on a binomial
/// proportion: the alpha-quantile of Beta(successes, trials - successes + 1).
/// Found by bisection on the binomial tail to 1e-10; the lower end of the
/// final bracket is returned so the bound errs on the conservative side.
double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double alpha);

/// sample_mean - sqrt(ln(1/alpha) / (2k)). Unclamped; may be negative.
double hoeffding_lower(double sample_mean, std::int64_t k, double alpha);

/// Empirical Bernstein lower bound (Maurer & Pontil):
///   mean - sqrt(2 S^2 ln(2/alpha) / k) - 7 ln(2/alpha) / (3 (k - 1)).
/// Requires k >= 2. alpha is accepted up to 2, where both deviation terms
/// vanish.
double bernstein_lower(double sample_mean, double sample_variance, std::int64_t k, double alpha);

/// Unbiased sample variance from first and second raw moment sums,
/// floored at zero.
double sample_variance_from_sums(double sum, double sum_sq, std::int64_t k);

/// dim i.i.d. N(0, sigma^2) draws.
std::vector<double> sample_gaussian(std::size_t dim, double sigma, RngStream& rng);

/// In-place variant writing out.size() draws.
void fill_gaussian(std::span<double> out, double sigma, RngStream& rng);

}  // namespace macer::statmath
