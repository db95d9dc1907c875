/*
 * Copyright 2026 The ultrbench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ULTR_CONFIG_HPP_
#define ULTR_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ultr {

// Flat `key = value` text: '#' starts a comment, blank lines are skipped,
// and repeating a key appends to its value list (grids).
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::string& path);

  // Replaces any existing values of key (command-line overrides).
  void set(const std::string& key, const std::string& value);
  void append(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  // Single-valued accessors throw ConfigError when the key repeats.
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  // Keys present in the file but never read by any accessor above.
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
  mutable std::map<std::string, bool> used_;
};

// Resolved experiment settings. Single source of truth for defaults; the
// echoed resolved-config text comes from here, not from the raw file.
struct ExperimentConfig {
  std::string train_path;
  std::string validation_path;
  std::string test_path;
  std::string dataset_name = "synthetic";
  std::string output_dir = "runs";

  bool scale = true;            // min-max feature scaling from train stats
  std::size_t feature_dim = 0;  // 0 = inferred from data

  std::size_t n_clicks = 10000;
  std::size_t top_n = 10;

  std::vector<std::string> estimators = {"ipssim"};
  std::vector<std::string> similarities = {"cosine"};
  std::vector<double> alphas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::size_t> top_sets = {5};
  double lambda = 1.0;
  bool strict_exclusion = false;
  double tau = 0.0;  // 0 derives 10/sqrt(n_clicks)

  std::size_t seeds = 5;
  std::uint64_t base_seed = 1;

  double logging_fraction = 0.1;
  std::size_t logging_epochs = 40;
  std::size_t epochs = 60;
  double learning_rate = 0.01;
  std::size_t pl_samples = 10;
  std::size_t regression_epochs = 60;

  std::string reference = "ips";
  bool paired = false;

  std::size_t threads = 0;  // CLI-only, not part of the config identity
};

// Reads every known key, applies defaults, validates ranges, and rejects
// unknown keys so typos fail loudly.
ExperimentConfig resolve_experiment(const ConfigFile& file);

// Canonical echo of the resolved settings, one `key = value` line per
// entry, grids repeated in order. Excludes threads.
std::string resolved_text(const ExperimentConfig& cfg);

// FNV-1a over the resolved text; names the run directory. reference and
// paired are excluded: they only steer the report stage, so re-marking an
// existing run must map to the same directory.
std::string config_stamp(const ExperimentConfig& cfg);

}  // namespace ultr

#endif  // ULTR_CONFIG_HPP_
