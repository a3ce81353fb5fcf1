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

#include "macer/train.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "macer/rng.hpp"

namespace macer {
namespace {

constexpr std::uint64_t kInitStream = 0x494e4954ULL;
constexpr std::uint64_t kNoiseStream = 0x4e4f495345ULL;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

StepSchedule::StepSchedule(std::vector<std::pair<int, double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty() || entries_.front().first != 0) {
    throw std::domain_error("schedule must start at epoch 0");
  }
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first <= entries_[i - 1].first) {
      throw std::domain_error("schedule epochs must be strictly increasing");
    }
  }
}

StepSchedule StepSchedule::parse(const std::string& text) {
  std::vector<std::pair<int, double>> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    std::size_t used = 0;
    try {
      if (colon == std::string::npos) {
        entries.emplace_back(entries.empty() ? 0 : -1, std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const std::string epoch_text = item.substr(0, colon);
        const std::string value_text = item.substr(colon + 1);
        const int epoch = std::stoi(epoch_text, &used);
        if (used != epoch_text.size()) throw std::invalid_argument(item);
        const double value = std::stod(value_text, &used);
        if (used != value_text.size()) throw std::invalid_argument(item);
        entries.emplace_back(epoch, value);
      }
    } catch (const std::logic_error&) {
      throw std::domain_error("malformed schedule entry '" + item + "'");
    }
  }
  return StepSchedule(std::move(entries));
}

double StepSchedule::value_at(int epoch) const {
  if (entries_.empty()) throw std::domain_error("empty schedule");
  double v = entries_.front().second;
  for (const auto& [e, value] : entries_) {
    if (e <= epoch) v = value;
  }
  return v;
}

std::string StepSchedule::to_string() const {
  std::string out;
  for (const auto& [e, v] : entries_) {
    if (!out.empty()) out += ',';
    out += std::to_string(e) + ':' + format_double(v);
  }
  return out;
}

void MacerConfig::validate() const {
  if (!(sigma > 0.0)) throw std::domain_error("train.sigma must be positive");
  if (k < 1) throw std::domain_error("train.k must be >= 1");
  if (!(gamma > 0.0)) throw std::domain_error("train.gamma must be positive");
  if (!(beta > 0.0)) throw std::domain_error("train.beta must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::domain_error("train.momentum must lie in [0, 1)");
  if (epochs < 0) throw std::domain_error("train.epochs must be >= 0");
  if (batch_size < 1) throw std::domain_error("train.batch_size must be >= 1");
  if (lambda.entries().empty()) throw std::domain_error("train.lambda schedule is empty");
  if (lr.entries().empty()) throw std::domain_error("train.lr schedule is empty");
  for (const auto& [e, v] : lambda.entries()) {
    if (!(v >= 0.0)) throw std::domain_error("train.lambda values must be >= 0");
  }
  for (const auto& [e, v] : lr.entries()) {
    if (!(v > 0.0)) throw std::domain_error("train.lr values must be positive");
  }
  for (int h : hidden) {
    if (h < 1) throw std::domain_error("train.hidden sizes must be positive");
  }
}

LossParams MacerConfig::loss_params(int epoch) const {
  return {sigma, lambda.value_at(epoch), gamma, beta, robust_beta_only ? 1.0 : beta};
}

std::vector<int> layer_dims_for(const Dataset& data, const std::vector<int>& hidden) {
  std::vector<int> dims{data.dim()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(data.num_classes);
  return dims;
}

SmallNet initial_net(const Dataset& data, const MacerConfig& cfg) {
  RngStream rng(cfg.seed, kInitStream);
  return SmallNet::he_uniform(layer_dims_for(data, cfg.hidden), rng);
}

TrainResult train(const Dataset& data, const MacerConfig& cfg,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  data.validate();
  if (data.size() == 0) throw std::domain_error("train: empty dataset");

  TrainResult result{initial_net(data, cfg), {}};
  SmallNet& net = result.net;
  GradientSet velocity = net.zeros_like();
  const RngStream noise_root(cfg.seed, kNoiseStream);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossParams params = cfg.loss_params(epoch);
    const double lr = cfg.lr.value_at(epoch);
    const RngStream epoch_rng = noise_root.substream(static_cast<std::uint64_t>(epoch));
    EpochLog log{epoch, 0.0, 0.0, 0.0, 0.0, lr, params.lambda};

    for (const auto& batch : minibatches(data.size(), static_cast<std::size_t>(cfg.batch_size),
                                         static_cast<std::uint64_t>(epoch), cfg.seed)) {
      GradientSet grads = net.zeros_like();
      for (std::size_t i : batch) {
        auto [loss, g] = macer_loss_backward(net, data.example(i), data.labels[i], cfg.k, params,
                                             epoch_rng.substream(i));
        grads += g;
        log.mean_total += loss.total;
        log.mean_ce += loss.classification;
        log.mean_hinge += loss.robustness;
        log.frac_in_correct_set += loss.in_correct_set ? 1.0 : 0.0;
      }
      grads *= 1.0 / static_cast<double>(batch.size());
      sgd_step(net, grads, lr, cfg.momentum, velocity);
    }
    const double inv_n = 1.0 / static_cast<double>(data.size());
    log.mean_total *= inv_n;
    log.mean_ce *= inv_n;
    log.mean_hinge *= inv_n;
    log.frac_in_correct_set *= inv_n;
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

void write_epoch_log_csv(const std::vector<EpochLog>& log, std::ostream& out) {
  out << "epoch,mean_total,mean_ce,mean_hinge,frac_in_G,lr,lambda\n";
  char buf[256];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%d,%.8f,%.8f,%.8f,%.6f,%.8g,%.8g\n", e.epoch, e.mean_total,
                  e.mean_ce, e.mean_hinge, e.frac_in_correct_set, e.lr, e.lambda);
    out << buf;
  }
}

}  // namespace macer
