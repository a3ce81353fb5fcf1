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

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "macer/config.hpp"
#include "macer/data.hpp"
#include "macer/eval.hpp"
#include "macer/train.hpp"

/// The train -> certify -> eval drivers behind the command-line tool. Every
/// command is a pure function of its RunConfig and input files; progress and
/// summaries go to `log`.
namespace macer::pipeline {

Dataset load_split(const DataSelection& data, const std::string& split);

/// Trains, then writes the checkpoint and the epoch log CSV.
TrainResult cmd_train(const RunConfig& rc, std::ostream& log);

/// Certifies the selected split with the saved checkpoint and writes the
/// per-example CSV.
std::vector<EvalRow> cmd_certify(const RunConfig& rc, std::ostream& log);

/// Reads the per-example CSV, prints the radius/ACR table and writes the
/// curve CSV.
EvalReport cmd_eval(const RunConfig& rc, std::ostream& log);

struct SweepRow {
  std::string value;
  double acr = 0.0;
  std::vector<double> accuracies;
};

/// One train/certify/eval run per swept value, artifacts under sweep.dir,
/// combined CSV "param_value,acr,acc_<r>..." at sweep.out.
std::vector<SweepRow> cmd_sweep(const RunConfig& rc, std::ostream& log);

/// Hard-RS versus Soft-RS (Hoeffding, Bernstein) on the selected split.
SoftHardComparison cmd_compare_rs(const RunConfig& rc, std::ostream& log);

/// Per-run config for one swept value, with artifact paths under sweep.dir.
RunConfig sweep_run_config(const RunConfig& rc, const std::string& value);

}  // namespace macer::pipeline
