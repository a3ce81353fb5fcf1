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

// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "macer/data.hpp"
#include "macer/eval.hpp"
#include "macer/objective.hpp"
#include "macer/smoothing.hpp"
#include "macer/statmath.hpp"
#include "macer/train.hpp"
#include "macer_reference.hpp"
#include "row_helpers.hpp"

namespace {

using namespace macer;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Confidence-bound coverage

Outcome bound_coverage() {
  constexpr int kReps = 10000;
  const double ps[] = {0.6, 0.9, 0.99};
  const std::int64_t ks[] = {100, 1000};
  const double alphas[] = {0.05, 0.001};
  const BoundKind kinds[] = {BoundKind::kClopperPearson, BoundKind::kHoeffding,
                             BoundKind::kBernstein};
  bool ok = true;
  double worst_ratio = 0.0;
  std::string worst;
  int stream = 0;
  for (double p : ps) {
    for (std::int64_t k : ks) {
      RngStream rng(20240601, static_cast<std::uint64_t>(stream++));
      std::vector<std::int64_t> successes(kReps);
      for (auto& s : successes) {
        s = 0;
        for (std::int64_t i = 0; i < k; ++i) s += rng.uniform() < p ? 1 : 0;
      }
      for (double alpha : alphas) {
        const double limit = alpha + 3.0 * std::sqrt(alpha / kReps);
        for (BoundKind kind : kinds) {
          std::map<std::int64_t, double> memo;
          auto lower = [&](std::int64_t s) {
            auto it = memo.find(s);
            if (it != memo.end()) return it->second;
            const double mean = static_cast<double>(s) / static_cast<double>(k);
            double v = 0.0;
            switch (kind) {
              case BoundKind::kClopperPearson:
                v = statmath::clopper_pearson_lower(s, k, alpha);
                break;
              case BoundKind::kHoeffding:
                v = statmath::hoeffding_lower(mean, k, alpha);
                break;
              case BoundKind::kBernstein: {
                const double sum = static_cast<double>(s);
                v = statmath::bernstein_lower(
                    mean, statmath::sample_variance_from_sums(sum, sum, k), k, alpha);
                break;
              }
            }
            memo.emplace(s, v);
            return v;
          };
          int exceed = 0;
          for (std::int64_t s : successes) exceed += lower(s) > p ? 1 : 0;
          const double freq = static_cast<double>(exceed) / kReps;
          if (freq > limit) ok = false;
          if (freq / limit >= worst_ratio) {
            worst_ratio = freq / limit;
            worst = format("%s p=%.2f k=%lld alpha=%g: %.4f vs limit %.4f",
                           std::string(to_string(kind)).c_str(), p, static_cast<long long>(k),
                           alpha, freq, limit);
          }
        }
      }
    }
  }
  return {ok, "36 cells; tightest " + worst};
}

// ---------------------------------------------------------------------------
// 2. Halfspace certification oracle

Outcome halfspace_oracle() {
  constexpr int kDim = 10;
  constexpr int kPoints = 100;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector w(kDim);
  for (int i = 0; i < kDim; ++i) w(i) = normal(gen);
  const double b = 0.3;
  SmallNet net({kDim, 2});
  net.layer(0).weight.row(1) = w.transpose();
  net.layer(0).bias(1) = -b;

  CertifyConfig cfg;
  cfg.sigma = 0.25;
  cfg.n0 = 100;
  cfg.n = 100000;
  cfg.alpha = 0.001;

  int invalid = 0;
  int abstained = 0;
  double ratio_sum = 0.0;
  double min_ratio = 1e9;
  for (int i = 0; i < kPoints; ++i) {
    Vector x(kDim);
    for (int j = 0; j < kDim; ++j) x(j) = normal(gen);
    const double distance = cfg.sigma * (0.5 + 2.5 * unit(gen));
    const double side = unit(gen) < 0.5 ? -1.0 : 1.0;
    x += ((side * distance * w.norm() + b - w.dot(x)) / w.squaredNorm()) * w;
    const double analytic = std::fabs(w.dot(x) - b) / w.norm();
    RngStream rng(5150, static_cast<std::uint64_t>(i));
    const auto r = hard_certify(net, x, cfg, rng);
    if (r.abstained()) {
      ++abstained;
      min_ratio = 0.0;
      continue;
    }
    const int truth = side > 0 ? 1 : 0;
    if (r.prediction != truth || r.radius > analytic) ++invalid;
    ratio_sum += r.radius / analytic;
    min_ratio = std::min(min_ratio, r.radius / analytic);
  }
  const double mean_ratio = ratio_sum / kPoints;
  return {invalid == 0 && mean_ratio >= 0.8,
          format("violations %d, abstained %d, mean radius/distance %.4f (min %.4f)", invalid,
                 abstained, mean_ratio, min_ratio)};
}

// ---------------------------------------------------------------------------
// 3. Gradient correctness

Outcome gradient_correctness() {
  int checked = 0;
  double worst = 0.0;
  std::size_t params = 0;
  for (std::uint64_t seed = 1000; checked < 20 && seed < 50000; ++seed) {
    auto inst = macer::testing::draw_gradient_instance(seed, {3, 10, 8, 4});
    if (!inst) continue;
    ++checked;
    const auto [loss, grads] =
        macer_loss_backward(inst->net, inst->x, inst->y, inst->k, inst->params, inst->rng);
    if (!loss.xi_hat || *loss.xi_hat >= inst->params.gamma) return {false, "hinge not active"};
    const auto check =
        macer::testing::check_against_finite_differences(inst->net, inst->frozen, grads.flatten());
    worst = std::max(worst, check.max_relative_error);
    params = check.parameters;
  }
  return {checked == 20 && worst <= 1e-4,
          format("%d instances x %zu parameters, worst relative error %.2e", checked, params,
                 worst)};
}

// ---------------------------------------------------------------------------
// 4. Bounded robustness gradient

Outcome gradient_bound() {
  std::mt19937_64 gen(404);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> classes(2, 10);
  const double gammas[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  int evaluations = 0;
  int non_finite = 0;
  int over = 0;
  double tightest = 0.0;
  while (evaluations < 10000) {
    const int K = classes(gen);
    Vector z(K);
    const double spread = 0.1 + 25.0 * std::fabs(normal(gen));
    for (int c = 0; c < K; ++c) z(c) = std::exp(spread * normal(gen));
    z /= z.sum();
    if (!z.allFinite()) continue;
    LossParams p;
    p.sigma = 0.25;
    p.lambda = 16.0;
    p.gamma = gammas[evaluations % 5];
    const int y = argmax_lowest(z);
    const auto xi = xi_hat(z, y);
    if (!xi || *xi >= p.gamma) continue;
    ++evaluations;
    const Vector g = robustness_gradient_wrt_zhat(z, y, p);
    if (!g.allFinite()) {
      ++non_finite;
      continue;
    }
    const double tail = statmath::std_normal_cdf(-p.gamma);
    const double bound =
        0.5 * p.lambda * p.sigma *
        std::max(1.0 / statmath::std_normal_pdf(statmath::std_normal_quantile(1.0 - tail)),
                 1.0 / statmath::std_normal_pdf(statmath::std_normal_quantile(tail / (K - 1))));
    const double magnitude = g.cwiseAbs().maxCoeff();
    if (magnitude > bound * (1.0 + 1e-12)) ++over;
    tightest = std::max(tightest, magnitude / bound);
  }
  return {non_finite == 0 && over == 0,
          format("%d hinge-active evaluations, non-finite %d, over bound %d, max |g|/bound %.3f",
                 evaluations, non_finite, over, tightest)};
}

// ---------------------------------------------------------------------------
// 5 and 6. MNIST subset: MACER vs Gaussian-augmentation baseline

struct MnistRun {
  double acr_macer = 0.0;
  double acr_base = 0.0;
  SmallNet macer_net;
};

struct MnistState {
  bool loaded = false;
  std::string error;
  Dataset train;
  Dataset test;
  std::vector<MnistRun> runs;
  double cpu_seconds = 0.0;
};

MnistState& mnist_state() {
  static MnistState state;
  return state;
}

MacerConfig mnist_config(std::uint64_t seed, bool robust) {
  MacerConfig cfg;
  cfg.sigma = 0.25;
  cfg.k = robust ? 16 : 1;
  cfg.lambda = StepSchedule::constant(robust ? 16.0 : 0.0);
  cfg.gamma = 8.0;
  cfg.beta = 16.0;
  cfg.robust_beta_only = true;
  cfg.lr = StepSchedule::parse("0:0.01,40:0.001");
  cfg.momentum = 0.9;
  cfg.epochs = 60;
  cfg.batch_size = 32;
  cfg.hidden = {128};
  cfg.seed = seed;
  return cfg;
}

CertifyConfig mnist_certify_config() {
  CertifyConfig cfg;
  cfg.sigma = 0.25;
  cfg.n0 = 100;
  cfg.n = 1000;
  cfg.alpha = 0.001;
  cfg.beta = 16.0;
  return cfg;
}

Outcome mnist_directional_gain() {
  auto& st = mnist_state();
  const fs::path dir = fs::path(MACER_DATA_DIR) / "mnist-subset";
  try {
    st.train = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte", 1000);
    st.test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte", 500);
    st.loaded = true;
  } catch (const std::exception& e) {
    st.error = e.what();
    return {false, "cannot load MNIST subset: " + st.error};
  }
  const std::clock_t start = std::clock();
  const CertifyConfig cert = mnist_certify_config();
  int wins = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    MnistRun run;
    run.macer_net = train(st.train, mnist_config(seed, true)).net;
    const SmallNet base = train(st.train, mnist_config(seed, false)).net;
    run.acr_macer = average_certified_radius(certify_dataset(run.macer_net, st.test, cert, 900));
    run.acr_base = average_certified_radius(certify_dataset(base, st.test, cert, 900));
    wins += run.acr_macer > run.acr_base ? 1 : 0;
    per_seed += format("%sseed %llu: %.4f vs %.4f", per_seed.empty() ? "" : "; ",
                       static_cast<unsigned long long>(seed), run.acr_macer, run.acr_base);
    st.runs.push_back(std::move(run));
  }
  st.cpu_seconds = static_cast<double>(std::clock() - start) / CLOCKS_PER_SEC;
  return {wins >= 2 && st.cpu_seconds <= 900.0,
          format("MACER wins %d/3 (ACR macer vs baseline: %s), CPU %.0f s", wins,
                 per_seed.c_str(), st.cpu_seconds)};
}

Outcome hard_vs_soft() {
  auto& st = mnist_state();
  if (!st.loaded || st.runs.empty()) return {false, "criterion 5 model unavailable"};
  const auto cmp = compare_soft_hard(st.runs.front().macer_net, st.test, mnist_certify_config(), 900);
  return {cmp.mutually_certified > 0 && cmp.median_hard_mutual >= cmp.median_bernstein_mutual,
          format("%zu mutually certified; median radius hard %.4f vs bernstein %.4f",
                 cmp.mutually_certified, cmp.median_hard_mutual, cmp.median_bernstein_mutual)};
}

// ---------------------------------------------------------------------------
// 7. ACR equals the area under the step curve

Outcome acr_area_identity() {
  double worst_ref = 0.0;
  double worst_lib = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto rows = macer::testing::random_rows(seed, 1 + (seed * 37) % 500);
    const double acr = average_certified_radius(rows);
    worst_ref = std::max(worst_ref, std::fabs(macer::testing::step_area_reference(rows) - acr));
    worst_lib = std::max(worst_lib, std::fabs(step_curve_area(rows) - acr));
  }
  return {worst_ref <= 1e-12 && worst_lib <= 1e-12,
          format("1000 row sets; max |area - ACR| %.1e (reference), %.1e (library)", worst_ref,
                 worst_lib)};
}

// ---------------------------------------------------------------------------
// 8. Soft mean at beta = 64 matches the vote fraction

Outcome beta_convergence() {
  constexpr std::int64_t kSamples = 1000;
  std::mt19937_64 gen(808);
  std::normal_distribution<double> normal;
  SmallNet net({4, 3});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) net.layer(0).weight(r, c) = 1e6 * normal(gen);
  }
  double worst = 0.0;
  double min_gap = 1e300;
  int mixed = 0;
  int accepted = 0;
  int rejected = 0;
  for (std::uint64_t i = 0; accepted < 100 && i < 1000; ++i) {
    Vector x(4);
    for (int c = 0; c < 4; ++c) x(c) = 0.1 * normal(gen);
    const RngStream base(8080, i);
    RngStream probe = base;
    double gap = 1e300;
    for_each_noisy_logits(net, x, kSamples, 0.25, probe, [&](const Matrix& logits) {
      for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        Vector col = logits.col(j);
        std::sort(col.data(), col.data() + col.size());
        gap = std::min(gap, col(2) - col(1));
      }
    });
    if (gap < 0.5) {
      ++rejected;
      continue;
    }
    ++accepted;
    min_gap = std::min(min_gap, gap);
    RngStream for_votes = base;
    RngStream for_soft = base;
    const auto votes = count_votes(net, x, kSamples, 0.25, for_votes);
    const auto moments = sample_under_noise(net, x, kSamples, 0.25, 64.0, for_soft);
    const int top = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    if (votes[top] < kSamples) ++mixed;
    const double vote_fraction = static_cast<double>(votes[top]) / kSamples;
    worst = std::max(worst, std::fabs(moments.first(top) / kSamples - vote_fraction));
  }
  return {accepted == 100 && min_gap >= 0.5 && worst <= 1e-6,
          format("%d inputs (%d with split votes, %d rejected for gap < 0.5), min logit gap %.3g, "
                 "max |z_A - vote| %.1e",
                 accepted, mixed, rejected, min_gap, worst)};
}

// ---------------------------------------------------------------------------
// 9. End-to-end determinism through the command-line tool

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome end_to_end_determinism() {
  const fs::path root = fs::temp_directory_path() / "macer_acceptance_determinism";
  fs::remove_all(root);
  const char* files[] = {"model.smnet", "train_log.csv", "certify.csv", "curve.csv"};
  std::vector<std::string> contents[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / (run == 0 ? "a" : "b");
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "run.cfg");
      cfg << "[data]\ndataset = blobs\nblobs_per_class = 60\nblobs_classes = 3\n"
          << "[train]\nsigma = 0.25\nk = 8\nlambda = 4\ngamma = 8\nbeta = 16\n"
          << "epochs = 5\nbatch_size = 32\nhidden = 16,16\nseed = 42\n"
          << "checkpoint = " << (dir / "model.smnet").string() << "\n"
          << "log = " << (dir / "train_log.csv").string() << "\n"
          << "[certify]\nn0 = 50\nn = 500\nalpha = 0.001\nseed = 7\n"
          << "checkpoint = " << (dir / "model.smnet").string() << "\n"
          << "out = " << (dir / "certify.csv").string() << "\n"
          << "[eval]\nrows = " << (dir / "certify.csv").string() << "\n"
          << "curve = " << (dir / "curve.csv").string() << "\n";
    }
    for (const char* cmd : {"train", "certify", "eval"}) {
      const std::string line = std::string("\"") + MACER_CLI_PATH + "\" " + cmd + " -c \"" +
                               (dir / "run.cfg").string() + "\" > \"" +
                               (dir / (std::string(cmd) + ".stdout")).string() + "\" 2>&1";
      if (std::system(line.c_str()) != 0) return {false, std::string("macer ") + cmd + " failed"};
    }
    for (const char* f : files) contents[run].push_back(slurp(dir / f));
  }
  std::string mismatched;
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < std::size(files); ++i) {
    bytes += contents[0][i].size();
    if (contents[0][i].empty() || contents[0][i] != contents[1][i]) {
      mismatched += std::string(mismatched.empty() ? "" : ", ") + files[i];
    }
  }
  fs::remove_all(root);
  if (!mismatched.empty()) return {false, "differing or empty outputs: " + mismatched};
  return {true, format("checkpoint, training log, certify rows and curve identical (%zu bytes)",
                       bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "confidence-bound coverage", bound_coverage},
      {2, "halfspace certification oracle", halfspace_oracle},
      {3, "gradient correctness", gradient_correctness},
      {4, "robustness gradient bound", gradient_bound},
      {5, "directional MACER gain on MNIST subset", mnist_directional_gain},
      {6, "hard radius >= soft (bernstein) radius", hard_vs_soft},
      {7, "ACR equals step-curve area", acr_area_identity},
      {8, "beta-convergence of soft mean", beta_convergence},
      {9, "end-to-end determinism", end_to_end_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += outcome.pass ? 0 : 1;
    std::printf("%s  [%d] %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
