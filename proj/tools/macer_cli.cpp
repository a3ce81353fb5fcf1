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

// Command-line driver: train, certify, eval, sweep, compare-rs.
//
// Exit codes: 0 success, 1 validation or parse error, 2 I/O error.

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macer/config.hpp"
#include "macer/errors.hpp"
#include "macer/pipeline.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

macer::RunConfig resolve(const std::string& config_path, const std::vector<std::string>& overrides) {
  macer::KeyValueConfig kv;
  if (!config_path.empty()) kv = macer::KeyValueConfig::load(config_path);
  for (const auto& o : overrides) kv.apply_override(o);
  return macer::build_run_config(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified-radius training and randomized-smoothing certification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "key=value config file with [sections]");
    sub->add_option("-s,--set", overrides, "override a config key: section.key=value")
        ->take_all();
  };

  auto* train = app.add_subcommand("train", "train a model and write checkpoint + epoch log");
  auto* certify = app.add_subcommand("certify", "certify a split and write per-example CSV");
  auto* eval = app.add_subcommand("eval", "summarize a per-example CSV into a radius table");
  auto* sweep = app.add_subcommand("sweep", "train/certify/eval once per swept value");
  auto* compare = app.add_subcommand("compare-rs", "compare Hard-RS with Soft-RS bounds");
  for (auto* sub : {train, certify, eval, sweep, compare}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    const macer::RunConfig rc = resolve(config_path, overrides);
    if (train->parsed()) macer::pipeline::cmd_train(rc, std::cout);
    if (certify->parsed()) macer::pipeline::cmd_certify(rc, std::cout);
    if (eval->parsed()) macer::pipeline::cmd_eval(rc, std::cout);
    if (sweep->parsed()) macer::pipeline::cmd_sweep(rc, std::cout);
    if (compare->parsed()) macer::pipeline::cmd_compare_rs(rc, std::cout);
  } catch (const macer::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const macer::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const macer::FormatError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  }
  return EXIT_SUCCESS;
}
