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
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "macer/data.hpp"
#include "macer/net.hpp"
#include "macer/objective.hpp"

namespace macer {

/// Piecewise-constant schedule: value_at(e) is the value of the last entry
/// whose epoch is <= e. Values change stepwise, never interpolated.
class StepSchedule {
 public:
  StepSchedule() = default;
  /// Entries must start at epoch 0 with strictly increasing epochs.
  explicit StepSchedule(std::vector<std::pair<int, double>> entries);
  static StepSchedule constant(double value) { return StepSchedule({{0, value}}); }
  /// Parses "0:0.01,200:0.001,400:0.0001"; a bare number means constant.
  static StepSchedule parse(const std::string& text);

  double value_at(int epoch) const;
  const std::vector<std::pair<int, double>>& entries() const { return entries_; }
  std::string to_string() const;

 private:
  std::vector<std::pair<int, double>> entries_;
};

struct MacerConfig {
  double sigma = 0.25;
  int k = 16;
  StepSchedule lambda = StepSchedule::constant(12.0);
  double gamma = 8.0;
  double beta = 16.0;
  /// When set, the cross-entropy term uses beta = 1 and only the robustness
  /// term sees the configured beta.
  bool robust_beta_only = false;
  StepSchedule lr = StepSchedule::constant(0.01);
  double momentum = 0.9;
  int epochs = 10;
  int batch_size = 64;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};

  /// Throws std::domain_error naming the offending field.
  void validate() const;
  LossParams loss_params(int epoch) const;
};

struct EpochLog {
  int epoch = 0;
  double mean_total = 0.0;
  double mean_ce = 0.0;
  double mean_hinge = 0.0;
  double frac_in_correct_set = 0.0;
  double lr = 0.0;
  double lambda = 0.0;
};

struct TrainResult {
  SmallNet net;
  std::vector<EpochLog> log;
};

/// Architecture for a dataset: {dim, hidden..., classes}.
std::vector<int> layer_dims_for(const Dataset& data, const std::vector<int>& hidden);

/// He-uniform initialization keyed by cfg.seed.
SmallNet initial_net(const Dataset& data, const MacerConfig& cfg);

/// Minibatch momentum SGD on the mean per-sample MACER objective. Noise for
/// sample i at epoch e, draw j comes from a stream keyed by (seed, e, i, j),
/// so the result is a pure function of (data, cfg).
TrainResult train(const Dataset& data, const MacerConfig& cfg,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

/// Header "epoch,mean_total,mean_ce,mean_hinge,frac_in_G,lr,lambda".
void write_epoch_log_csv(const std::vector<EpochLog>& log, std::ostream& out);

}  // namespace macer
