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

#include "macer/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "macer/errors.hpp"

namespace macer {
namespace {

void require_rows(const std::vector<EvalRow>& rows, const char* op) {
  if (rows.empty()) throw std::domain_error(std::string(op) + ": no rows");
}

MethodSummary summarize(const std::vector<EvalRow>& rows, BoundKind bound) {
  MethodSummary s;
  s.bound = bound;
  s.acr = average_certified_radius(rows);
  s.clean_accuracy = certified_accuracy(rows, 0.0);
  std::vector<double> radii;
  for (const auto& r : rows) {
    if (r.correct) radii.push_back(r.radius);
  }
  s.certified = radii.size();
  s.median_radius = median(radii);
  return s;
}

}  // namespace

EvalRow make_eval_row(std::size_t index, int label, const CertificationResult& result) {
  EvalRow row;
  row.index = index;
  row.label = label;
  row.prediction = result.prediction;
  row.radius = result.abstained() ? 0.0 : result.radius;
  row.correct = !result.abstained() && result.prediction == label;
  return row;
}

double certified_accuracy(const std::vector<EvalRow>& rows, double epsilon) {
  require_rows(rows, "certified_accuracy");
  if (!(epsilon >= 0.0)) throw std::domain_error("certified_accuracy: epsilon must be >= 0");
  const auto hits = std::count_if(rows.begin(), rows.end(), [epsilon](const EvalRow& r) {
    return r.correct && r.radius >= epsilon;
  });
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

double average_certified_radius(const std::vector<EvalRow>& rows) {
  require_rows(rows, "average_certified_radius");
  double sum = 0.0;
  for (const auto& r : rows) sum += r.correct ? r.radius : 0.0;
  return sum / static_cast<double>(rows.size());
}

std::vector<CurvePoint> radius_accuracy_curve(const std::vector<EvalRow>& rows,
                                              const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::domain_error("radius_accuracy_curve: grid must be sorted ascending");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(grid.size());
  for (double eps : grid) curve.push_back({eps, certified_accuracy(rows, eps)});
  return curve;
}

double step_curve_area(const std::vector<EvalRow>& rows) {
  require_rows(rows, "step_curve_area");
  std::vector<double> radii;
  for (const auto& r : rows) {
    if (r.correct) radii.push_back(r.radius);
  }
  std::sort(radii.begin(), radii.end());
  // On (r_{i-1}, r_i] the accuracy is (#radii >= r_i) / N.
  double area = 0.0;
  double prev = 0.0;
  const auto n = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    area += (radii[i] - prev) * static_cast<double>(radii.size() - i) / n;
    prev = radii[i];
  }
  return area;
}

std::vector<double> default_radius_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 9; ++i) grid.push_back(0.25 * i);
  return grid;
}

EvalReport make_report(std::vector<EvalRow> rows, std::vector<double> grid) {
  EvalReport report;
  for (const auto& p : radius_accuracy_curve(rows, grid)) report.accuracies.push_back(p.accuracy);
  report.acr = average_certified_radius(rows);
  report.rows = std::move(rows);
  report.radii_grid = std::move(grid);
  return report;
}

std::vector<EvalRow> certify_dataset(const SmallNet& net, const Dataset& data,
                                     const CertifyConfig& cfg, std::uint64_t seed,
                                     std::size_t limit) {
  cfg.validate();
  const std::size_t n = std::min(limit, data.size());
  std::vector<EvalRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, i);
    rows.push_back(make_eval_row(i, data.labels[i], certify(net, data.example(i), cfg, rng)));
  }
  return rows;
}

SoftHardComparison compare_soft_hard(const SmallNet& net, const Dataset& data,
                                     const CertifyConfig& cfg, std::uint64_t seed,
                                     std::size_t limit) {
  CertifyConfig hard_cfg = cfg;
  hard_cfg.bound = BoundKind::kClopperPearson;
  CertifyConfig hoeffding_cfg = cfg;
  hoeffding_cfg.bound = BoundKind::kHoeffding;
  CertifyConfig bernstein_cfg = cfg;
  bernstein_cfg.bound = BoundKind::kBernstein;

  SoftHardComparison out;
  out.hard = certify_dataset(net, data, hard_cfg, seed, limit);
  out.hoeffding = certify_dataset(net, data, hoeffding_cfg, seed, limit);
  out.bernstein = certify_dataset(net, data, bernstein_cfg, seed, limit);
  if (out.hard.empty()) return out;

  out.hard_summary = summarize(out.hard, BoundKind::kClopperPearson);
  out.hoeffding_summary = summarize(out.hoeffding, BoundKind::kHoeffding);
  out.bernstein_summary = summarize(out.bernstein, BoundKind::kBernstein);

  std::vector<double> hard_mutual;
  std::vector<double> bern_mutual;
  double max_sum = 0.0;
  for (std::size_t i = 0; i < out.hard.size(); ++i) {
    const auto& h = out.hard[i];
    const auto& s = out.bernstein[i];
    const auto& o = out.hoeffding[i];
    if (h.correct && s.correct) {
      hard_mutual.push_back(h.radius);
      bern_mutual.push_back(s.radius);
    }
    max_sum += std::max({h.correct ? h.radius : 0.0, s.correct ? s.radius : 0.0,
                         o.correct ? o.radius : 0.0});
  }
  out.mutually_certified = hard_mutual.size();
  out.median_hard_mutual = median(hard_mutual);
  out.median_bernstein_mutual = median(bern_mutual);
  out.acr_pointwise_max = max_sum / static_cast<double>(out.hard.size());
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

void write_rows_csv(const std::vector<EvalRow>& rows, std::ostream& out) {
  out << "idx,label,prediction,radius,correct\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.6f,%d\n", r.index, r.label, r.prediction, r.radius,
                  r.correct ? 1 : 0);
    out << buf;
  }
}

std::vector<EvalRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("line 1: empty CSV (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "idx,label,prediction,radius,correct") {
    throw FormatError("line 1: expected header idx,label,prediction,radius,correct");
  }
  std::vector<EvalRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != 5) throw FormatError(where + "expected 5 fields");
    EvalRow r;
    try {
      std::size_t used = 0;
      const long long idx = std::stoll(fields[0], &used);
      if (used != fields[0].size() || idx < 0) throw std::invalid_argument("idx");
      r.index = static_cast<std::size_t>(idx);
      r.label = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("label");
      r.prediction = std::stoi(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("prediction");
      r.radius = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("radius");
    } catch (const std::logic_error&) {
      throw FormatError(where + "malformed numeric field");
    }
    if (fields[4] != "0" && fields[4] != "1") throw FormatError(where + "correct must be 0 or 1");
    r.correct = fields[4] == "1";
    if (!(r.radius >= 0.0)) throw FormatError(where + "radius must be >= 0");
    if (r.prediction < kAbstain) throw FormatError(where + "prediction must be >= -1");
    if (r.prediction == kAbstain && (r.radius != 0.0 || r.correct)) {
      throw FormatError(where + "abstained row must have radius 0 and correct 0");
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw FormatError("line " + std::to_string(line_no) + ": CSV has no data rows");
  return rows;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
  out << "radius,accuracy\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.radius, p.accuracy);
    out << buf;
  }
}

void print_report_table(const EvalReport& report, const std::string& method, std::ostream& out) {
  char buf[64];
  out << "method      ";
  for (double r : report.radii_grid) {
    std::snprintf(buf, sizeof buf, " %6.2f", r);
    out << buf;
  }
  out << "    ACR\n";
  std::snprintf(buf, sizeof buf, "%-12s", method.c_str());
  out << buf;
  for (double a : report.accuracies) {
    std::snprintf(buf, sizeof buf, " %6.3f", a);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "  %6.3f\n", report.acr);
  out << buf;
}

}  // namespace macer
