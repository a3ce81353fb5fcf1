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

#include "macer/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "macer/errors.hpp"

namespace macer {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"data",
       {"dataset", "train_images", "train_labels", "test_images", "test_labels", "train_limit",
        "test_limit", "blobs_per_class", "blobs_test_per_class", "blobs_classes", "blobs_dim",
        "blobs_scale", "blobs_noise", "blobs_seed"}},
      {"train",
       {"sigma", "k", "lambda", "gamma", "beta", "robust_beta_only", "lr", "momentum", "epochs",
        "batch_size", "seed", "hidden", "checkpoint", "log"}},
      {"certify",
       {"checkpoint", "bound", "sigma", "n0", "n", "alpha", "beta", "seed", "split", "limit", "out",
        "compare_out"}},
      {"eval", {"rows", "grid", "curve"}},
      {"sweep", {"param", "values", "out", "dir"}},
  };
  return keys;
}

// Typed access that reports failures as "section.key".
class Reader {
 public:
  explicit Reader(const KeyValueConfig& kv) : kv_(kv) {}

  bool has(const std::string& s, const std::string& k) const { return kv_.get(s, k).has_value(); }

  std::string str(const std::string& s, const std::string& k, const std::string& def) const {
    return kv_.get(s, k).value_or(def);
  }

  double real(const std::string& s, const std::string& k, double def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used == v->size()) return d;
    } catch (const std::logic_error&) {
    }
    throw ConfigError(s + "." + k + ": expected a number, got '" + *v + "'");
  }

  long long integer(const std::string& s, const std::string& k, long long def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    try {
      std::size_t used = 0;
      const long long i = std::stoll(*v, &used);
      if (used == v->size()) return i;
    } catch (const std::logic_error&) {
    }
    throw ConfigError(s + "." + k + ": expected an integer, got '" + *v + "'");
  }

  long long non_negative(const std::string& s, const std::string& k, long long def) const {
    const long long v = integer(s, k, def);
    if (v < 0) throw ConfigError(s + "." + k + ": must be >= 0");
    return v;
  }

  bool boolean(const std::string& s, const std::string& k, bool def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ConfigError(s + "." + k + ": expected true/false, got '" + *v + "'");
  }

  StepSchedule schedule(const std::string& s, const std::string& k, const StepSchedule& def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    try {
      return StepSchedule::parse(*v);
    } catch (const std::domain_error& e) {
      throw ConfigError(s + "." + k + ": " + e.what());
    }
  }

  std::vector<int> int_list(const std::string& s, const std::string& k,
                            const std::vector<int>& def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    std::vector<int> out;
    for (const auto& item : split_list(*v)) {
      try {
        std::size_t used = 0;
        const int i = std::stoi(item, &used);
        if (used == item.size() && i > 0) {
          out.push_back(i);
          continue;
        }
      } catch (const std::logic_error&) {
      }
      throw ConfigError(s + "." + k + ": expected positive integers, got '" + item + "'");
    }
    return out;
  }

  std::vector<double> grid(const std::string& s, const std::string& k,
                           const std::vector<double>& def) const {
    const auto v = kv_.get(s, k);
    if (!v) return def;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
      try {
        std::size_t used = 0;
        const double d = std::stod(item, &used);
        if (used == item.size() && d >= 0.0) {
          out.push_back(d);
          continue;
        }
      } catch (const std::logic_error&) {
      }
      throw ConfigError(s + "." + k + ": expected non-negative radii, got '" + item + "'");
    }
    if (out.empty() || !std::is_sorted(out.begin(), out.end())) {
      throw ConfigError(s + "." + k + ": grid must be a non-empty ascending list");
    }
    return out;
  }

 private:
  const KeyValueConfig& kv_;
};

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!known_keys().contains(section)) {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value");
    if (section.empty()) throw ConfigError(where + "key outside of any [section]");
    cfg.set(section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in, path.string());
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  }
  set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
      trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  const auto it = known_keys().find(section);
  if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
  if (!it->second.contains(key)) throw ConfigError("unknown key " + section + "." + key);
  sections_[section][key] = value;
}

std::optional<std::string> KeyValueConfig::get(const std::string& section,
                                               const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void apply_sweep_value(MacerConfig& cfg, const std::string& param, const std::string& value) {
  KeyValueConfig kv;
  if (param != "k" && param != "lambda" && param != "gamma" && param != "beta") {
    throw ConfigError("sweep.param: must be one of k, lambda, gamma, beta");
  }
  kv.set("train", param, value);
  const Reader r(kv);
  if (param == "k") {
    cfg.k = static_cast<int>(r.integer("train", "k", cfg.k));
  } else if (param == "lambda") {
    cfg.lambda = r.schedule("train", "lambda", cfg.lambda);
  } else if (param == "gamma") {
    cfg.gamma = r.real("train", "gamma", cfg.gamma);
  } else {
    cfg.beta = r.real("train", "beta", cfg.beta);
  }
  try {
    cfg.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError("sweep.values: " + value + " is invalid for " + param + " (" + e.what() + ")");
  }
}

RunConfig build_run_config(const KeyValueConfig& kv) {
  const Reader r(kv);
  RunConfig rc;

  auto& d = rc.data;
  d.kind = r.str("data", "dataset", d.kind);
  if (d.kind != "blobs" && d.kind != "idx") {
    throw ConfigError("data.dataset: must be 'blobs' or 'idx', got '" + d.kind + "'");
  }
  d.train_images = r.str("data", "train_images", "");
  d.train_labels = r.str("data", "train_labels", "");
  d.test_images = r.str("data", "test_images", "");
  d.test_labels = r.str("data", "test_labels", "");
  d.train_limit = static_cast<std::size_t>(r.non_negative("data", "train_limit", 1000));
  d.test_limit = static_cast<std::size_t>(r.non_negative("data", "test_limit", 500));
  d.blobs_per_class = static_cast<int>(r.non_negative("data", "blobs_per_class", d.blobs_per_class));
  d.blobs_test_per_class =
      static_cast<int>(r.non_negative("data", "blobs_test_per_class", d.blobs_test_per_class));
  d.blobs_classes = static_cast<int>(r.non_negative("data", "blobs_classes", d.blobs_classes));
  d.blobs_dim = static_cast<int>(r.non_negative("data", "blobs_dim", d.blobs_dim));
  d.blobs_scale = r.real("data", "blobs_scale", d.blobs_scale);
  d.blobs_noise = r.real("data", "blobs_noise", d.blobs_noise);
  d.blobs_seed = static_cast<std::uint64_t>(r.non_negative("data", "blobs_seed", 1));
  if (d.kind == "blobs") {
    if (d.blobs_classes < 2) throw ConfigError("data.blobs_classes: must be >= 2");
    if (d.blobs_dim < 2) throw ConfigError("data.blobs_dim: must be >= 2");
    if (d.blobs_per_class < 1) throw ConfigError("data.blobs_per_class: must be >= 1");
  }

  auto& t = rc.train;
  t.sigma = r.real("train", "sigma", t.sigma);
  t.k = static_cast<int>(r.integer("train", "k", t.k));
  t.lambda = r.schedule("train", "lambda", t.lambda);
  t.gamma = r.real("train", "gamma", t.gamma);
  t.beta = r.real("train", "beta", t.beta);
  t.robust_beta_only = r.boolean("train", "robust_beta_only", t.robust_beta_only);
  t.lr = r.schedule("train", "lr", t.lr);
  t.momentum = r.real("train", "momentum", t.momentum);
  t.epochs = static_cast<int>(r.integer("train", "epochs", t.epochs));
  t.batch_size = static_cast<int>(r.integer("train", "batch_size", t.batch_size));
  t.seed = static_cast<std::uint64_t>(r.non_negative("train", "seed", 0));
  t.hidden = r.int_list("train", "hidden", t.hidden);
  try {
    t.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  rc.checkpoint = r.str("train", "checkpoint", rc.checkpoint.string());
  rc.train_log = r.str("train", "log", rc.train_log.string());

  auto& c = rc.certify;
  c.checkpoint = r.str("certify", "checkpoint", rc.checkpoint.string());
  const std::string bound = r.str("certify", "bound", "clopper_pearson");
  if (!parse_bound_kind(bound, c.cfg.bound)) {
    throw ConfigError("certify.bound: must be clopper_pearson, hoeffding or bernstein, got '" +
                      bound + "'");
  }
  c.cfg.sigma = r.real("certify", "sigma", t.sigma);
  c.cfg.n0 = r.integer("certify", "n0", c.cfg.n0);
  c.cfg.n = r.integer("certify", "n", c.cfg.n);
  c.cfg.alpha = r.real("certify", "alpha", c.cfg.alpha);
  c.cfg.beta = r.real("certify", "beta", t.beta);
  try {
    c.cfg.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  c.seed = static_cast<std::uint64_t>(r.non_negative("certify", "seed", 0));
  c.split = r.str("certify", "split", c.split);
  if (c.split != "test" && c.split != "train") {
    throw ConfigError("certify.split: must be 'test' or 'train'");
  }
  if (r.has("certify", "limit")) {
    c.limit = static_cast<std::size_t>(r.non_negative("certify", "limit", 0));
  }
  c.out = r.str("certify", "out", c.out.string());
  c.compare_out = r.str("certify", "compare_out", c.compare_out.string());

  auto& e = rc.eval;
  e.rows = r.str("eval", "rows", c.out.string());
  e.grid = r.grid("eval", "grid", e.grid);
  e.curve = r.str("eval", "curve", e.curve.string());

  auto& s = rc.sweep;
  s.param = r.str("sweep", "param", "");
  if (r.has("sweep", "values")) s.values = split_list(*kv.get("sweep", "values"));
  s.out = r.str("sweep", "out", s.out.string());
  s.dir = r.str("sweep", "dir", s.dir.string());
  if (!s.param.empty()) {
    MacerConfig probe = t;
    for (const auto& v : s.values) apply_sweep_value(probe, s.param, v);
  }
  return rc;
}

}  // namespace macer
