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
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "macer/eval.hpp"
#include "macer/smoothing.hpp"
#include "macer/train.hpp"

namespace macer {

/// Flat UTF-8 key=value text grouped under [section] headers. Blank lines
/// and lines starting with '#' are ignored.
class KeyValueConfig {
 public:
  /// Throws ConfigError naming the line on syntax errors.
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  /// Throws IoError if the file cannot be opened.
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Applies "section.key=value", replacing any value from the file.
  void apply_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct DataSelection {
  /// "blobs" or "idx".
  std::string kind = "blobs";
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  std::size_t train_limit = 1000;
  std::size_t test_limit = 500;
  int blobs_per_class = 100;
  int blobs_test_per_class = 100;
  int blobs_classes = 3;
  int blobs_dim = 2;
  double blobs_scale = 0.5;
  double blobs_noise = 0.1;
  std::uint64_t blobs_seed = 1;
};

struct CertifyRun {
  CertifyConfig cfg;
  std::filesystem::path checkpoint = "model.smnet";
  /// "test" or "train".
  std::string split = "test";
  std::size_t limit = SIZE_MAX;
  std::uint64_t seed = 0;
  std::filesystem::path out = "certify.csv";
  std::filesystem::path compare_out = "compare_rs.csv";
};

struct EvalRun {
  std::filesystem::path rows = "certify.csv";
  std::vector<double> grid = default_radius_grid();
  std::filesystem::path curve = "curve.csv";
};

struct SweepRun {
  /// One of k, lambda, gamma, beta.
  std::string param;
  std::vector<std::string> values;
  std::filesystem::path out = "sweep.csv";
  std::filesystem::path dir = "sweep_runs";
};

struct RunConfig {
  DataSelection data;
  MacerConfig train;
  std::filesystem::path checkpoint = "model.smnet";
  std::filesystem::path train_log = "train_log.csv";
  CertifyRun certify;
  EvalRun eval;
  SweepRun sweep;
};

/// Builds and validates a RunConfig. Unknown sections or keys and invalid
/// values raise ConfigError naming "section.key".
RunConfig build_run_config(const KeyValueConfig& kv);

/// Applies one swept value ("k", "lambda", "gamma", "beta") to a MacerConfig.
void apply_sweep_value(MacerConfig& cfg, const std::string& param, const std::string& value);

}  // namespace macer
