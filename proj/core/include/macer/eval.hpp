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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "macer/data.hpp"
#include "macer/net.hpp"
#include "macer/smoothing.hpp"

namespace macer {

struct EvalRow {
  std::size_t index = 0;
  int label = 0;
  int prediction = kAbstain;
  double radius = 0.0;
  bool correct = false;
};

EvalRow make_eval_row(std::size_t index, int label, const CertificationResult& result);

struct CurvePoint {
  double radius = 0.0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<double> radii_grid;
  std::vector<double> accuracies;
  double acr = 0.0;
};

/// Fraction of rows that are correct with radius >= epsilon.
double certified_accuracy(const std::vector<EvalRow>& rows, double epsilon);

/// Mean of (radius if correct else 0). Abstentions count as zero.
double average_certified_radius(const std::vector<EvalRow>& rows);

/// certified_accuracy at each grid point; the grid must be ascending.
std::vector<CurvePoint> radius_accuracy_curve(const std::vector<EvalRow>& rows,
                                              const std::vector<double>& grid);

/// Exact area under the step function epsilon -> certified_accuracy(epsilon)
/// on [0, max radius], summed over the breakpoints.
double step_curve_area(const std::vector<EvalRow>& rows);

/// 0.00, 0.25, ..., 2.25.
std::vector<double> default_radius_grid();

EvalReport make_report(std::vector<EvalRow> rows, std::vector<double> grid);

/// Certifies every example of `data` (at most `limit`). Example i uses the
/// stream RngStream(seed, i), so results do not depend on evaluation order.
std::vector<EvalRow> certify_dataset(const SmallNet& net, const Dataset& data,
                                     const CertifyConfig& cfg, std::uint64_t seed,
                                     std::size_t limit = SIZE_MAX);

struct MethodSummary {
  BoundKind bound = BoundKind::kClopperPearson;
  double acr = 0.0;
  double clean_accuracy = 0.0;
  std::size_t certified = 0;
  /// Median radius over this method's non-abstaining correct rows.
  double median_radius = 0.0;
};

struct SoftHardComparison {
  std::vector<EvalRow> hard;
  std::vector<EvalRow> hoeffding;
  std::vector<EvalRow> bernstein;
  MethodSummary hard_summary;
  MethodSummary hoeffding_summary;
  MethodSummary bernstein_summary;
  /// Rows where both Hard-RS and Soft-RS (Bernstein) certify correctly.
  std::size_t mutually_certified = 0;
  double median_hard_mutual = 0.0;
  double median_bernstein_mutual = 0.0;
  /// ACR of the per-example maximum radius across the three methods.
  double acr_pointwise_max = 0.0;
};

/// Certifies each example with all three bounds sharing sigma, n0, n and
/// alpha from `cfg` (cfg.bound is ignored). All methods use the same
/// per-example stream, so the soft bounds see identical noise.
SoftHardComparison compare_soft_hard(const SmallNet& net, const Dataset& data,
                                     const CertifyConfig& cfg, std::uint64_t seed,
                                     std::size_t limit = SIZE_MAX);

double median(std::vector<double> values);

/// Header "idx,label,prediction,radius,correct"; ABSTAIN is -1, radius has
/// six decimals, correct is 0/1. LF line endings.
void write_rows_csv(const std::vector<EvalRow>& rows, std::ostream& out);
/// Throws FormatError naming the line number on malformed input, including
/// an empty file.
std::vector<EvalRow> read_rows_csv(std::istream& in);

/// Header "radius,accuracy".
void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out);

/// Radius columns followed by ACR, one data row labelled `method`.
void print_report_table(const EvalReport& report, const std::string& method, std::ostream& out);

}  // namespace macer
