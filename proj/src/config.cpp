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
#include "ultr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ultr/common.hpp"
#include "ultr/estimators.hpp"
#include "ultr/similarity.hpp"

namespace ultr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'",
                                        line_no);
    cfg.values_[key].push_back(value);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse(in);
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  values_[key] = {value};
}

void ConfigFile::append(const std::string& key, const std::string& value) {
  values_[key].push_back(value);
}

bool ConfigFile::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  if (it->second.size() != 1) {
    throw ConfigError("key '" + key + "' must not repeat");
  }
  return it->second.front();
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return {};
  used_[key] = true;
  return it->second;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [p, e] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (e != std::errc() || p != text.data() + text.size()) {
    throw ConfigError("key '" + key + "': bad number '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, e] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (e != std::errc() || p != text.data() + text.size()) {
    throw ConfigError("key '" + key + "': bad count '" + text + "'");
  }
  return v;
}

}  // namespace

double ConfigFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return parse_double(key, get_string(key, ""));
}

std::size_t ConfigFile::get_size(const std::string& key,
                                 std::size_t fallback) const {
  if (!has(key)) return fallback;
  return static_cast<std::size_t>(parse_u64(key, get_string(key, "")));
}

std::uint64_t ConfigFile::get_u64(const std::string& key,
                                  std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return parse_u64(key, get_string(key, ""));
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v +
                    "'");
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& v : get_list(key)) out.push_back(parse_double(key, v));
  return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, values] : values_) {
    (void)values;
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

ExperimentConfig resolve_experiment(const ConfigFile& file) {
  ExperimentConfig cfg;
  cfg.train_path = file.get_string("train", "");
  cfg.validation_path = file.get_string("validation", "");
  cfg.test_path = file.get_string("test", "");
  if (cfg.train_path.empty() || cfg.validation_path.empty() ||
      cfg.test_path.empty()) {
    throw ConfigError("train, validation and test paths are required");
  }
  cfg.dataset_name = file.get_string("dataset_name", cfg.dataset_name);
  cfg.output_dir = file.get_string("output_dir", cfg.output_dir);
  cfg.scale = file.get_bool("scale_features", cfg.scale);
  cfg.feature_dim = file.get_size("feature_dim", cfg.feature_dim);
  cfg.n_clicks = file.get_size("n_clicks", cfg.n_clicks);
  cfg.top_n = file.get_size("top_n", cfg.top_n);

  if (file.has("estimator")) cfg.estimators = file.get_list("estimator");
  if (file.has("similarity")) cfg.similarities = file.get_list("similarity");
  if (file.has("alpha")) cfg.alphas = file.get_double_list("alpha");
  if (file.has("top_set")) {
    cfg.top_sets.clear();
    for (const auto& v : file.get_list("top_set")) {
      cfg.top_sets.push_back(static_cast<std::size_t>(parse_u64("top_set", v)));
    }
  }
  cfg.lambda = file.get_double("lambda", cfg.lambda);
  cfg.strict_exclusion = file.get_bool("strict_exclusion",
                                       cfg.strict_exclusion);
  cfg.tau = file.get_double("tau", cfg.tau);

  cfg.seeds = file.get_size("seeds", cfg.seeds);
  cfg.base_seed = file.get_u64("seed", cfg.base_seed);

  cfg.logging_fraction = file.get_double("logging_fraction",
                                         cfg.logging_fraction);
  cfg.logging_epochs = file.get_size("logging_epochs", cfg.logging_epochs);
  cfg.epochs = file.get_size("epochs", cfg.epochs);
  cfg.learning_rate = file.get_double("learning_rate", cfg.learning_rate);
  cfg.pl_samples = file.get_size("pl_samples", cfg.pl_samples);
  cfg.regression_epochs = file.get_size("regression_epochs",
                                        cfg.regression_epochs);

  cfg.reference = file.get_string("reference", cfg.reference);
  cfg.paired = file.get_bool("paired", cfg.paired);

  const auto unknown = file.unused_keys();
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }

  if (cfg.estimators.empty() || cfg.similarities.empty() ||
      cfg.alphas.empty() || cfg.top_sets.empty()) {
    throw ConfigError("all grids must be non-empty");
  }
  for (const auto& e : cfg.estimators) parse_estimator(e);   // validates
  for (const auto& s : cfg.similarities) parse_measure(s);   // validates
  for (const double a : cfg.alphas) {
    if (a < 0.0 || a > 1.0) throw ConfigError("alpha must be in [0, 1]");
  }
  for (const std::size_t t : cfg.top_sets) {
    if (t < 1) throw ConfigError("top_set must be at least 1");
  }
  if (cfg.seeds < 1) throw ConfigError("seeds must be at least 1");
  if (cfg.n_clicks < 1) throw ConfigError("n_clicks must be positive");
  if (cfg.top_n < 1) throw ConfigError("top_n must be positive");
  if (cfg.tau < 0.0) throw ConfigError("tau must not be negative");
  parse_estimator(cfg.reference);
  return cfg;
}

std::string resolved_text(const ExperimentConfig& cfg) {
  std::string out;
  auto add = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto add_num = [&add](const std::string& key, double value) {
    add(key, format_double(value));
  };
  add("train", cfg.train_path);
  add("validation", cfg.validation_path);
  add("test", cfg.test_path);
  add("dataset_name", cfg.dataset_name);
  add("output_dir", cfg.output_dir);
  add("scale_features", cfg.scale ? "true" : "false");
  add("feature_dim", std::to_string(cfg.feature_dim));
  add("n_clicks", std::to_string(cfg.n_clicks));
  add("top_n", std::to_string(cfg.top_n));
  for (const auto& e : cfg.estimators) add("estimator", e);
  for (const auto& s : cfg.similarities) add("similarity", s);
  for (const double a : cfg.alphas) add_num("alpha", a);
  for (const std::size_t t : cfg.top_sets) add("top_set", std::to_string(t));
  add_num("lambda", cfg.lambda);
  add("strict_exclusion", cfg.strict_exclusion ? "true" : "false");
  add_num("tau", cfg.tau);
  add("seeds", std::to_string(cfg.seeds));
  add("seed", std::to_string(cfg.base_seed));
  add_num("logging_fraction", cfg.logging_fraction);
  add("logging_epochs", std::to_string(cfg.logging_epochs));
  add("epochs", std::to_string(cfg.epochs));
  add_num("learning_rate", cfg.learning_rate);
  add("pl_samples", std::to_string(cfg.pl_samples));
  add("regression_epochs", std::to_string(cfg.regression_epochs));
  add("reference", cfg.reference);
  add("paired", cfg.paired ? "true" : "false");
  return out;
}

std::string config_stamp(const ExperimentConfig& cfg) {
  // reference and paired only steer the report stage, which is always
  // recomputed from runs.csv; excluding them lets `report --reference x`
  // re-mark an existing run directory instead of demanding a fresh run.
  ExperimentConfig identity = cfg;
  identity.reference.clear();
  identity.paired = false;
  const std::string text = resolved_text(identity);
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(12, '0');
  for (std::size_t i = 0; i < 12; ++i) {
    out[i] = hex[(h >> (4 * (11 - i))) & 0xf];
  }
  return out;
}

}  // namespace ultr
