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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "macer/smoothing.hpp"
#include "macer/statmath.hpp"
#include "oracles.hpp"

namespace macer {
namespace {

using statmath::std_normal_cdf;
using statmath::std_normal_quantile;

/// Two-class linear net: logit_1 - logit_0 = w.x - b.
SmallNet halfspace(const Vector& w, double b) {
  SmallNet net({static_cast<int>(w.size()), 2});
  net.layer(0).weight.row(1) = w.transpose();
  net.layer(0).bias(1) = -b;
  return net;
}

/// Input-independent logits.
SmallNet constant_net(int d, const Vector& logits) {
  SmallNet net({d, static_cast<int>(logits.size())});
  net.layer(0).bias = logits;
  return net;
}

TEST(Radius, HardExamples) {
  EXPECT_DOUBLE_EQ(hard_radius_from_probs(0.5, 0.5, 0.25), 0.0);
  EXPECT_NEAR(hard_radius_from_probs(0.841345, 0.158655, 0.25), 0.25, 1e-6);
  // 0.25 * (1.2815515655 + 1.6448536270), quantiles from the bisection oracle.
  EXPECT_NEAR(macer::testing::quantile_by_bisection(0.9), 1.2815515655, 1e-9);
  EXPECT_NEAR(hard_radius_from_probs(0.9, 0.05, 0.5), 0.731601298, 1e-8);
  EXPECT_THROW(hard_radius_from_probs(0.4, 0.5, 0.25), std::domain_error);
}

TEST(Radius, SoftExamplesAndScaling) {
  EXPECT_DOUBLE_EQ(soft_radius_from_expectations(0.3, 0.3, 1.0), 0.0);
  // Phi^-1(0.933246) = 1.500410891 by the bisection oracle.
  EXPECT_NEAR(macer::testing::quantile_by_bisection(0.933246), 1.500410891, 1e-8);
  EXPECT_NEAR(soft_radius_from_expectations(0.933246, 0.066754, 1.0), 1.500410891, 1e-8);
  EXPECT_NEAR(soft_radius_from_expectations(0.8, 0.1, 0.5),
              2.0 * soft_radius_from_expectations(0.8, 0.1, 0.25), 1e-15);
  EXPECT_THROW(soft_radius_from_expectations(0.1, 0.2, 1.0), std::domain_error);
}

TEST(Radius, MonotoneInBothArguments) {
  for (double a = 0.3; a < 1.0; a += 0.05) {
    for (double b = 0.0; b + 0.05 <= a; b += 0.05) {
      EXPECT_LE(hard_radius_from_probs(a, b, 0.5), hard_radius_from_probs(a + 0.01, b, 0.5));
      EXPECT_GE(hard_radius_from_probs(a, b, 0.5), hard_radius_from_probs(a, b + 0.01, 0.5));
    }
  }
}

TEST(SampleUnderNoise, SingleSampleAndInvariants) {
  RngStream rng0(3, 0);
  const auto net = SmallNet::he_uniform({4, 6, 3}, rng0);
  Vector x = Vector::Constant(4, 0.2);

  RngStream a(5, 1);
  const auto one = sample_under_noise(net, x, 1, 0.3, 2.0, a);
  EXPECT_EQ(one.num, 1);
  EXPECT_TRUE(one.second.isApprox(one.first.cwiseProduct(one.first), 1e-15));

  RngStream b(5, 2);
  const auto many = sample_under_noise(net, x, 500, 0.3, 2.0, b);
  for (int c = 0; c < 3; ++c) {
    EXPECT_GE(many.second(c), 0.0);
    EXPECT_LE(many.second(c), many.first(c));
    EXPECT_LE(many.first(c), 500.0);
  }
  EXPECT_NEAR(many.first.sum(), 500.0, 1e-9);

  Vector logits(3);
  logits << 0.3, -1.0, 2.0;
  const auto flat = constant_net(4, logits);
  RngStream c(6, 0);
  const auto constant = sample_under_noise(flat, x, 300, 0.5, 3.0, c);
  EXPECT_TRUE((constant.first / 300.0).isApprox(softmax_temp(logits, 3.0), 1e-13));
}

TEST(SampleUnderNoise, DeterministicGivenStream) {
  RngStream init(1, 0);
  const auto net = SmallNet::he_uniform({3, 5, 2}, init);
  const Vector x = Vector::Constant(3, -0.1);
  RngStream a(9, 4);
  RngStream b(9, 4);
  const auto ma = sample_under_noise(net, x, 700, 0.25, 16.0, a);
  const auto mb = sample_under_noise(net, x, 700, 0.25, 16.0, b);
  EXPECT_EQ(ma.first, mb.first);
  EXPECT_EQ(ma.second, mb.second);
}

TEST(HardCertify, AllSuccessesGiveClosedFormRadius) {
  Vector logits(3);
  logits << 0.0, 1.0, 0.0;
  const auto net = constant_net(2, logits);
  CertifyConfig cfg;
  cfg.n0 = 100;
  cfg.n = 100;
  cfg.alpha = 0.001;
  cfg.sigma = 0.25;
  RngStream rng(1, 0);
  const auto r = hard_certify(net, Vector::Zero(2), cfg, rng);
  EXPECT_EQ(r.prediction, 1);
  EXPECT_NEAR(r.lower_bound, std::pow(0.001, 0.01), 1e-9);
  // 0.25 * Phi^-1(0.001^(1/100)) = 0.375118756 via the bisection oracle.
  EXPECT_NEAR(r.radius, 0.375118756, 1e-8);
  EXPECT_NEAR(r.radius, cfg.sigma * std_normal_quantile(r.lower_bound), 1e-15);
}

TEST(HardCertify, CoinFlipAbstains) {
  Vector w(2);
  w << 1.0, 0.0;
  const auto net = halfspace(w, 0.0);
  CertifyConfig cfg;
  cfg.n = 2000;
  RngStream rng(2, 0);
  const auto r = hard_certify(net, Vector::Zero(2), cfg, rng);
  EXPECT_TRUE(r.abstained());
  EXPECT_EQ(r.radius, 0.0);
  EXPECT_LE(r.lower_bound, 0.5);
}

TEST(HardCertify, HalfspaceRadiusApproachesDistance) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> normal;
  const int d = 6;
  Vector w(d);
  for (int i = 0; i < d; ++i) w(i) = normal(gen);
  const double b = 0.3;
  const auto net = halfspace(w, b);
  CertifyConfig cfg;
  cfg.sigma = 0.5;
  cfg.n = 100000;
  for (int trial = 0; trial < 4; ++trial) {
    Vector x(d);
    for (int i = 0; i < d; ++i) x(i) = normal(gen);
    const double target = (1.0 + 0.5 * trial) * cfg.sigma * (trial % 2 ? 1.0 : -1.0);
    x += ((target * w.norm() + b - w.dot(x)) / w.squaredNorm()) * w;
    const double dist = std::fabs(w.dot(x) - b) / w.norm();
    RngStream rng(100, trial);
    const auto r = hard_certify(net, x, cfg, rng);
    ASSERT_FALSE(r.abstained());
    EXPECT_EQ(r.prediction, target > 0 ? 1 : 0);
    EXPECT_LE(r.radius, dist);
    EXPECT_GE(r.radius, 0.95 * dist);
  }
}

TEST(HardCertify, CertifiedBallKeepsAnalyticPrediction) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  Vector w(3);
  w << 1.0, -2.0, 0.5;
  const double b = -0.2;
  const double sigma = 0.4;
  const auto net = halfspace(w, b);
  CertifyConfig cfg;
  cfg.sigma = sigma;
  cfg.n = 3000;
  int certified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = normal(gen);
    RngStream rng(7, trial);
    const auto r = hard_certify(net, x, cfg, rng);
    if (r.abstained()) continue;
    ++certified;
    // Worst perturbation of norm r moves straight toward the boundary.
    const double sign = r.prediction == 1 ? 1.0 : -1.0;
    const Vector edge = x - sign * r.radius * w / w.norm();
    const double p1 = std_normal_cdf((w.dot(edge) - b) / (sigma * w.norm()));
    EXPECT_GE(r.prediction == 1 ? p1 : 1.0 - p1, 0.5 - 1e-12);
  }
  EXPECT_GT(certified, 20);
}

TEST(HardCertify, RequiresClopperPearson) {
  CertifyConfig cfg;
  cfg.bound = BoundKind::kHoeffding;
  RngStream rng(1, 1);
  EXPECT_THROW(hard_certify(SmallNet({2, 2}), Vector::Zero(2), cfg, rng), std::domain_error);
}

TEST(SoftCertify, HoeffdingAbstainsNearHalf) {
  Vector logits(2);
  logits << std::log(0.52 / 0.48), 0.0;
  const auto net = constant_net(3, logits);
  CertifyConfig cfg;
  cfg.bound = BoundKind::kHoeffding;
  cfg.beta = 1.0;
  cfg.n = 100;
  cfg.alpha = 0.001;
  RngStream rng(3, 0);
  const auto r = soft_certify(net, Vector::Zero(3), cfg, rng);
  EXPECT_TRUE(r.abstained());
  EXPECT_NEAR(r.lower_bound, 0.52 - std::sqrt(std::log(1000.0) / 200.0), 1e-12);
}

TEST(SoftCertify, BernsteinOnConstantNet) {
  const double delta = 1e-6;
  Vector logits(2);
  logits << std::log((1.0 - delta) / delta), 0.0;
  const auto net = constant_net(2, logits);
  CertifyConfig cfg;
  cfg.bound = BoundKind::kBernstein;
  cfg.beta = 1.0;
  cfg.n = 10000;
  cfg.alpha = 0.001;
  cfg.sigma = 0.25;
  RngStream rng(4, 0);
  const auto r = soft_certify(net, Vector::Zero(2), cfg, rng);
  ASSERT_FALSE(r.abstained());
  EXPECT_EQ(r.prediction, 0);
  // 0.25 * Phi^-1(1 - 1e-6 - 7 ln(2000) / (3 * 9999)), by the bisection oracle.
  EXPECT_NEAR(r.radius, 0.728913419, 1e-6);
}

TEST(SoftCertify, AbstainsWhenNoClassExceedsHalf) {
  Vector w(2);
  w << 2.0, 0.0;
  const auto net = halfspace(w, 0.0);
  for (auto kind : {BoundKind::kHoeffding, BoundKind::kBernstein}) {
    CertifyConfig cfg;
    cfg.bound = kind;
    cfg.beta = 4.0;
    cfg.n = 200;
    cfg.alpha = 0.05;
    int abstained = 0;
    const int reps = 300;
    for (int i = 0; i < reps; ++i) {
      RngStream rng(11, i);
      if (soft_certify(net, Vector::Zero(2), cfg, rng).abstained()) ++abstained;
    }
    EXPECT_GE(abstained, static_cast<int>(reps * (0.95 - 3 * std::sqrt(0.05 * 0.95 / reps))));
  }
}

TEST(SoftCertify, ResultInvariants) {
  RngStream init(8, 0);
  const auto net = SmallNet::he_uniform({3, 8, 4}, init);
  for (auto kind : {BoundKind::kHoeffding, BoundKind::kBernstein}) {
    for (int i = 0; i < 20; ++i) {
      CertifyConfig cfg;
      cfg.bound = kind;
      cfg.n = 500;
      cfg.beta = 8.0;
      RngStream rng(9, i);
      const Vector x = Vector::Constant(3, 0.1 * i - 1.0);
      const auto r = certify(net, x, cfg, rng);
      EXPECT_GE(r.lower_bound, 0.0);
      EXPECT_LE(r.lower_bound, 1.0);
      if (r.abstained()) {
        EXPECT_EQ(r.radius, 0.0);
        EXPECT_LE(r.lower_bound, 0.5);
      } else {
        EXPECT_NEAR(r.radius, cfg.sigma * std_normal_quantile(r.lower_bound), 1e-15);
      }
    }
  }
}

TEST(BetaLimit, SoftMeanMatchesVoteFraction) {
  // Steep linear boundaries make every realized logit gap far above 0.5.
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal;
  SmallNet net({4, 3});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) net.layer(0).weight(r, c) = 1e6 * normal(gen);
  }
  for (int i = 0; i < 20; ++i) {
    Vector x(4);
    for (int c = 0; c < 4; ++c) x(c) = 0.1 * normal(gen);
    RngStream base(12, i);
    RngStream probe = base;
    double min_gap = 1e300;
    for_each_noisy_logits(net, x, 1000, 0.25, probe, [&](const Matrix& logits) {
      for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        Vector col = logits.col(j);
        std::sort(col.data(), col.data() + col.size());
        min_gap = std::min(min_gap, col(2) - col(1));
      }
    });
    ASSERT_GE(min_gap, 0.5);
    RngStream for_votes = base;
    RngStream for_soft = base;
    const auto votes = count_votes(net, x, 1000, 0.25, for_votes);
    const auto moments = sample_under_noise(net, x, 1000, 0.25, 64.0, for_soft);
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(moments.first(c) / 1000.0, votes[c] / 1000.0, 1e-6);
    }
  }
}

TEST(SmoothedPredict, ConstantAndHalfspace) {
  Vector logits(3);
  logits << -1.0, 0.5, 0.2;
  const auto flat = constant_net(2, logits);
  for (auto mode : {SmoothingMode::kHard, SmoothingMode::kSoft}) {
    for (std::int64_t n : {1, 7, 100}) {
      RngStream rng(1, n);
      EXPECT_EQ(smoothed_predict(flat, Vector::Zero(2), 1.0, n, 4.0, mode, rng), 1);
    }
  }

  Vector w(2);
  w << 0.6, 0.8;
  const auto net = halfspace(w, 0.0);
  const double sigma = 0.3;
  const Vector x = 2.0 * sigma * w;
  const int reps = 4000;
  int correct = 0;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(2, i);
    if (smoothed_predict(net, x, sigma, 1, 1.0, SmoothingMode::kHard, rng) == 1) ++correct;
  }
  const double p = std_normal_cdf(2.0);
  EXPECT_GE(correct, reps * (p - 3.0 * std::sqrt(p * (1 - p) / reps)));
}

TEST(Lipschitz, HalfspaceQuantileHasGradientNormOneOverSigma) {
  Vector w(3);
  w << 0.3, -1.2, 2.0;
  const double b = 0.4;
  const double sigma = 0.7;
  auto g = [&](const Vector& x) {
    return std_normal_quantile(std_normal_cdf((w.dot(x) - b) / (sigma * w.norm())));
  };
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 0.5 * normal(gen);
    Vector grad(3);
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      Vector xp = x;
      Vector xm = x;
      xp(i) += h;
      xm(i) -= h;
      grad(i) = (g(xp) - g(xm)) / (2 * h);
    }
    EXPECT_NEAR(grad.norm(), 1.0 / sigma, 1e-6);
  }
}

TEST(CertifyConfig, Validation) {
  CertifyConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.n = 1;
  EXPECT_THROW(cfg.validate(), std::domain_error);
  cfg = CertifyConfig{};
  cfg.sigma = 0.0;
  EXPECT_THROW(cfg.validate(), std::domain_error);
  cfg = CertifyConfig{};
  cfg.n0 = 0;
  EXPECT_THROW(cfg.validate(), std::domain_error);
  BoundKind kind{};
  EXPECT_TRUE(parse_bound_kind("bernstein", kind));
  EXPECT_EQ(kind, BoundKind::kBernstein);
  EXPECT_EQ(to_string(BoundKind::kHoeffding), "hoeffding");
  EXPECT_FALSE(parse_bound_kind("wilson", kind));
}

}  // namespace
}  // namespace macer
