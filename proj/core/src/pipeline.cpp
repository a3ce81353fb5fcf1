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

#include "macer/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "macer/errors.hpp"
#include "macer/net.hpp"

namespace macer::pipeline {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string grid_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace

Dataset load_split(const DataSelection& data, const std::string& split) {
  const bool train = split == "train";
  if (data.kind == "blobs") {
    Dataset ds = make_blobs(train ? data.blobs_per_class : data.blobs_test_per_class,
                            data.blobs_classes, data.blobs_dim, data.blobs_scale, data.blobs_noise,
                            train ? data.blobs_seed : data.blobs_seed + 1);
    ds.name = train ? "blobs-train" : "blobs-test";
    return ds;
  }
  const auto& images = train ? data.train_images : data.test_images;
  const auto& labels = train ? data.train_labels : data.test_labels;
  if (images.empty() || labels.empty()) {
    throw ConfigError(std::string("data.") + (train ? "train" : "test") +
                      "_images/_labels: required when data.dataset = idx");
  }
  return load_idx(images, labels, train ? data.train_limit : data.test_limit);
}

TrainResult cmd_train(const RunConfig& rc, std::ostream& log) {
  const Dataset data = load_split(rc.data, "train");
  log << "training on " << data.name << ": " << data.size() << " examples, dim " << data.dim()
      << ", " << data.num_classes << " classes\n";
  TrainResult result = train(data, rc.train);

  save_checkpoint(result.net, rc.checkpoint);
  auto out = open_output(rc.train_log);
  write_epoch_log_csv(result.log, out);
  finish_output(out, rc.train_log);

  if (!result.log.empty()) {
    const auto& e = result.log.back();
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "epoch %d: loss %.4f (ce %.4f, hinge %.4f), in G %.3f, lr %g, lambda %g\n",
                  e.epoch, e.mean_total, e.mean_ce, e.mean_hinge, e.frac_in_correct_set, e.lr,
                  e.lambda);
    log << buf;
  } else {
    log << "0 epochs: wrote initialized model\n";
  }
  log << "checkpoint: " << rc.checkpoint.string() << "\n";
  return result;
}

std::vector<EvalRow> cmd_certify(const RunConfig& rc, std::ostream& log) {
  const SmallNet net = load_checkpoint(rc.certify.checkpoint);
  const Dataset data = load_split(rc.data, rc.certify.split);
  if (data.dim() != net.input_dim()) {
    throw ConfigError("certify.checkpoint: model expects input dim " +
                      std::to_string(net.input_dim()) + " but data has " +
                      std::to_string(data.dim()));
  }
  const auto rows = certify_dataset(net, data, rc.certify.cfg, rc.certify.seed, rc.certify.limit);
  auto out = open_output(rc.certify.out);
  write_rows_csv(rows, out);
  finish_output(out, rc.certify.out);
  log << "certified " << rows.size() << " examples with " << to_string(rc.certify.cfg.bound)
      << " -> " << rc.certify.out.string() << "\n";
  return rows;
}

EvalReport cmd_eval(const RunConfig& rc, std::ostream& log) {
  std::ifstream in(rc.eval.rows, std::ios::binary);
  if (!in) throw IoError("cannot open " + rc.eval.rows.string());
  EvalReport report = make_report(read_rows_csv(in), rc.eval.grid);
  print_report_table(report, "smoothed", log);

  std::vector<CurvePoint> curve;
  for (std::size_t i = 0; i < report.radii_grid.size(); ++i) {
    curve.push_back({report.radii_grid[i], report.accuracies[i]});
  }
  auto out = open_output(rc.eval.curve);
  write_curve_csv(curve, out);
  finish_output(out, rc.eval.curve);
  return report;
}

RunConfig sweep_run_config(const RunConfig& rc, const std::string& value) {
  RunConfig run = rc;
  apply_sweep_value(run.train, rc.sweep.param, value);
  const std::string stem = rc.sweep.param + "_" + value;
  run.checkpoint = rc.sweep.dir / (stem + ".smnet");
  run.train_log = rc.sweep.dir / (stem + "_train_log.csv");
  run.certify.checkpoint = run.checkpoint;
  run.certify.out = rc.sweep.dir / (stem + "_certify.csv");
  run.eval.rows = run.certify.out;
  run.eval.curve = rc.sweep.dir / (stem + "_curve.csv");
  return run;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& rc, std::ostream& log) {
  if (rc.sweep.param.empty()) throw ConfigError("sweep.param: required for the sweep command");
  if (rc.sweep.values.empty()) throw ConfigError("sweep.values: list must be non-empty");
  std::error_code ec;
  std::filesystem::create_directories(rc.sweep.dir, ec);
  if (ec) throw IoError("cannot create " + rc.sweep.dir.string() + ": " + ec.message());

  std::vector<SweepRow> rows;
  for (const auto& value : rc.sweep.values) {
    log << "== " << rc.sweep.param << " = " << value << "\n";
    const RunConfig run = sweep_run_config(rc, value);
    cmd_train(run, log);
    cmd_certify(run, log);
    const EvalReport report = cmd_eval(run, log);
    rows.push_back({value, report.acr, report.accuracies});
  }

  auto out = open_output(rc.sweep.out);
  out << "param_value,acr";
  for (double r : rc.eval.grid) out << ",acc_" << grid_label(r);
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.value;
    std::snprintf(buf, sizeof buf, ",%.6f", row.acr);
    out << buf;
    for (double a : row.accuracies) {
      std::snprintf(buf, sizeof buf, ",%.6f", a);
      out << buf;
    }
    out << "\n";
  }
  finish_output(out, rc.sweep.out);
  return rows;
}

SoftHardComparison cmd_compare_rs(const RunConfig& rc, std::ostream& log) {
  const SmallNet net = load_checkpoint(rc.certify.checkpoint);
  const Dataset data = load_split(rc.data, rc.certify.split);
  SoftHardComparison cmp =
      compare_soft_hard(net, data, rc.certify.cfg, rc.certify.seed, rc.certify.limit);

  auto out = open_output(rc.certify.compare_out);
  out << "idx,label,hard_prediction,hard_radius,hoeffding_prediction,hoeffding_radius,"
         "bernstein_prediction,bernstein_radius\n";
  char buf[256];
  for (std::size_t i = 0; i < cmp.hard.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.6f,%d,%.6f,%d,%.6f\n", cmp.hard[i].index,
                  cmp.hard[i].label, cmp.hard[i].prediction, cmp.hard[i].radius,
                  cmp.hoeffding[i].prediction, cmp.hoeffding[i].radius,
                  cmp.bernstein[i].prediction, cmp.bernstein[i].radius);
    out << buf;
  }
  finish_output(out, rc.certify.compare_out);

  for (const auto* s : {&cmp.hard_summary, &cmp.hoeffding_summary, &cmp.bernstein_summary}) {
    std::snprintf(buf, sizeof buf, "%-16s ACR %.4f  clean acc %.3f  certified %zu  median %.4f\n",
                  std::string(to_string(s->bound)).c_str(), s->acr, s->clean_accuracy, s->certified,
                  s->median_radius);
    log << buf;
  }
  std::snprintf(buf, sizeof buf,
                "mutually certified (hard & bernstein): %zu, median hard %.4f vs bernstein %.4f\n",
                cmp.mutually_certified, cmp.median_hard_mutual, cmp.median_bernstein_mutual);
  log << buf;
  return cmp;
}

}  // namespace macer::pipeline
