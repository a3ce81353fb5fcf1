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
#include <string>
#include <vector>

#include "macer/net.hpp"

namespace macer {

/// Examples stored column-wise: features is (dim x size), each entry in [0, 1].
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::string name;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.rows()); }
  Vector example(std::size_t i) const { return features.col(static_cast<Eigen::Index>(i)); }

  /// Throws std::domain_error if labels or features violate the invariants.
  void validate() const;
};

/// K Gaussian clusters in [0,1]^d. Cluster c is centered at
/// 0.5 + 0.5 * centers_scale * cos(2 pi c / K + j pi / 2) in coordinate j;
/// samples are clipped into the unit cube. Examples are grouped by class.
Dataset make_blobs(int n_per_class, int num_classes, int dim, double centers_scale,
                   double noise_std, std::uint64_t seed);

/// Loads an IDX image/label pair (pixels scaled by 1/255), keeping at most
/// `limit` examples. Throws IoError if a file cannot be read and FormatError
/// naming the offending field on malformed content.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, std::size_t limit);

/// Deterministic shuffle of [0, size) keyed by (seed, epoch), cut into
/// batches of batch_size; the final partial batch is kept.
std::vector<std::vector<std::size_t>> minibatches(std::size_t size, std::size_t batch_size,
                                                  std::uint64_t epoch, std::uint64_t seed);

}  // namespace macer
