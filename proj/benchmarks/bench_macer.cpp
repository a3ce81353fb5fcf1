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

#include <benchmark/benchmark.h>

#include "macer/objective.hpp"
#include "macer/smoothing.hpp"
#include "macer/statmath.hpp"

namespace {

using namespace macer;

void BM_NormalQuantile(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(statmath::std_normal_quantile(p));
    p = p < 0.999 ? p + 1e-3 : 1e-6;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_ClopperPearson(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::int64_t s = n / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(statmath::clopper_pearson_lower(s, n, 0.001));
    s = s < n ? s + 1 : n / 2;
  }
}
BENCHMARK(BM_ClopperPearson)->Arg(100)->Arg(1000)->Arg(100000);

void BM_ForwardBatch(benchmark::State& state) {
  RngStream rng(1, 0);
  const auto net = SmallNet::he_uniform({784, 128, 10}, rng);
  const Matrix inputs = Matrix::Random(784, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_logits_batch(net, inputs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(32)->Arg(256);

void BM_MacerLossBackward(benchmark::State& state) {
  RngStream rng(2, 0);
  const auto net = SmallNet::he_uniform({784, 128, 10}, rng);
  const Vector x = Vector::Random(784).cwiseAbs();
  LossParams params;
  params.lambda = 16.0;
  params.ce_beta = 1.0;
  const int k = static_cast<int>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(macer_loss_backward(net, x, 3, k, params, RngStream(3, i++)));
  }
}
BENCHMARK(BM_MacerLossBackward)->Arg(1)->Arg(16);

void BM_HardCertify(benchmark::State& state) {
  RngStream rng(4, 0);
  const auto net = SmallNet::he_uniform({784, 128, 10}, rng);
  const Vector x = Vector::Random(784).cwiseAbs();
  CertifyConfig cfg;
  cfg.n0 = 100;
  cfg.n = state.range(0);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream stream(5, i++);
    benchmark::DoNotOptimize(hard_certify(net, x, cfg, stream));
  }
  state.SetItemsProcessed(state.iterations() * (cfg.n0 + cfg.n));
}
BENCHMARK(BM_HardCertify)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SoftCertifyBernstein(benchmark::State& state) {
  RngStream rng(6, 0);
  const auto net = SmallNet::he_uniform({784, 128, 10}, rng);
  const Vector x = Vector::Random(784).cwiseAbs();
  CertifyConfig cfg;
  cfg.n0 = 100;
  cfg.n = 1000;
  cfg.bound = BoundKind::kBernstein;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream stream(7, i++);
    benchmark::DoNotOptimize(soft_certify(net, x, cfg, stream));
  }
}
BENCHMARK(BM_SoftCertifyBernstein)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
