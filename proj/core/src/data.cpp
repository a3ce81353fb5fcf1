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

#include "macer/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "macer/errors.hpp"
#include "macer/rng.hpp"

namespace macer {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;
constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t big_endian_u32(const std::string& bytes, std::size_t offset, const std::string& field) {
  if (offset + 4 > bytes.size()) throw FormatError("IDX truncated reading " + field);
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
  }
  return v;
}

}  // namespace

void Dataset::validate() const {
  if (num_classes < 2) throw std::domain_error("dataset " + name + ": fewer than two classes");
  if (static_cast<std::size_t>(features.cols()) != labels.size()) {
    throw std::domain_error("dataset " + name + ": feature/label count mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw std::domain_error("dataset " + name + ": label out of range");
  }
  if (!features.allFinite() || (features.size() > 0 &&
                                (features.minCoeff() < 0.0 || features.maxCoeff() > 1.0))) {
    throw std::domain_error("dataset " + name + ": features must be finite and in [0, 1]");
  }
}

Dataset make_blobs(int n_per_class, int num_classes, int dim, double centers_scale,
                   double noise_std, std::uint64_t seed) {
  if (num_classes < 2) throw std::domain_error("make_blobs: need K >= 2");
  if (dim < 2) throw std::domain_error("make_blobs: need d >= 2");
  if (n_per_class < 1) throw std::domain_error("make_blobs: need n_per_class >= 1");
  if (!(noise_std >= 0.0)) throw std::domain_error("make_blobs: noise_std must be >= 0");

  Dataset ds;
  ds.name = "blobs";
  ds.num_classes = num_classes;
  ds.features.resize(dim, static_cast<Eigen::Index>(n_per_class) * num_classes);
  ds.labels.reserve(static_cast<std::size_t>(n_per_class) * num_classes);
  RngStream rng(seed, 0);
  Eigen::Index col = 0;
  for (int c = 0; c < num_classes; ++c) {
    Vector center(dim);
    for (int j = 0; j < dim; ++j) {
      const double phase = 2.0 * std::numbers::pi * c / num_classes + j * std::numbers::pi / 2.0;
      center(j) = std::clamp(0.5 + 0.5 * centers_scale * std::cos(phase), 0.0, 1.0);
    }
    for (int i = 0; i < n_per_class; ++i, ++col) {
      for (int j = 0; j < dim; ++j) {
        const double noise = noise_std > 0.0 ? noise_std * rng.normal() : 0.0;
        ds.features(j, col) = std::clamp(center(j) + noise, 0.0, 1.0);
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, std::size_t limit) {
  const std::string images = read_file(images_path);
  const std::string labels = read_file(labels_path);

  if (big_endian_u32(images, 0, "images magic") != kImagesMagic) {
    throw FormatError("IDX images magic mismatch in " + images_path.string());
  }
  const std::uint32_t count = big_endian_u32(images, 4, "images count");
  const std::uint32_t rows = big_endian_u32(images, 8, "images rows");
  const std::uint32_t cols = big_endian_u32(images, 12, "images cols");
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (pixels == 0) throw FormatError("IDX images rows/cols must be positive");
  if (images.size() != 16 + static_cast<std::size_t>(count) * pixels) {
    throw FormatError("IDX images payload size does not match count*rows*cols in " +
                      images_path.string());
  }

  if (big_endian_u32(labels, 0, "labels magic") != kLabelsMagic) {
    throw FormatError("IDX labels magic mismatch in " + labels_path.string());
  }
  const std::uint32_t label_count = big_endian_u32(labels, 4, "labels count");
  if (labels.size() != 8 + static_cast<std::size_t>(label_count)) {
    throw FormatError("IDX labels payload size does not match labels count in " +
                      labels_path.string());
  }
  if (label_count != count) {
    throw FormatError("IDX count mismatch: images count " + std::to_string(count) +
                      " vs labels count " + std::to_string(label_count));
  }

  const std::size_t n = std::min<std::size_t>(count, limit);
  Dataset ds;
  ds.name = images_path.filename().string();
  ds.features.resize(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n));
  ds.labels.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = 16 + i * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      ds.features(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          static_cast<unsigned char>(images[base + p]) / 255.0;
    }
    ds.labels[i] = static_cast<unsigned char>(labels[8 + i]);
    max_label = std::max(max_label, ds.labels[i]);
  }
  // MNIST-style label files carry digits; fewer distinct labels in a short
  // prefix must not shrink the class count.
  ds.num_classes = std::max(10, max_label + 1);
  return ds;
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t size, std::size_t batch_size,
                                                  std::uint64_t epoch, std::uint64_t seed) {
  if (batch_size < 1) throw std::domain_error("minibatches: batch_size must be >= 1");
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng = RngStream(seed, kShuffleStream).substream(epoch);
  for (std::size_t i = size; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < size; start += batch_size) {
    const std::size_t end = std::min(size, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace macer
