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
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ultr/common.hpp"
#include "ultr/config.hpp"
#include "ultr/kernels.hpp"
#include "ultr/letor.hpp"
#include "ultr/pipeline.hpp"
#include "ultr/synthetic.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::size_t threads = 0;
  std::string impl = "auto";
};

// Assembles the experiment config from the file plus --set overrides. The
// first --set of a key replaces the file's values, later repeats of the
// same key extend it back into a grid.
ultr::ExperimentConfig assemble(const CommonArgs& args) {
  ultr::ConfigFile file;
  if (!args.config_path.empty()) {
    file = ultr::ConfigFile::load(args.config_path);
  }
  std::set<std::string> replaced;
  for (const std::string& s : args.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw ultr::ConfigError("--set expects key=value, got '" + s + "'");
    }
    const std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    if (replaced.insert(key).second) {
      file.set(key, value);
    } else {
      file.append(key, value);
    }
  }
  ultr::ExperimentConfig cfg = ultr::resolve_experiment(file);
  cfg.threads = args.threads;
  return cfg;
}

// Registers an experiment subcommand with the shared options and wires the
// stage body as its callback. Returns the subcommand so callers can attach
// targeted override flags.
CLI::App* add_stage(CLI::App& app, CommonArgs& args, const std::string& name,
                    const std::string& help,
                    std::function<void(const ultr::ExperimentConfig&)> body) {
  CLI::App* cmd = app.add_subcommand(name, help);
  cmd->add_option("--config", args.config_path, "experiment config file");
  cmd->add_option("--set", args.sets,
                  "override `key=value`; repeat a key to form a grid");
  cmd->add_option("--threads", args.threads,
                  "worker bound (0 = hardware); never changes results");
  cmd->add_option("--impl", args.impl, "kernels: auto | scalar | avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  cmd->callback([&args, body = std::move(body)] {
    ultr::kernels::set_impl(ultr::kernels::parse_impl(args.impl));
    body(assemble(args));
  });
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ultrbench: counterfactual learning-to-rank experiments over "
      "simulated clicks"};
  app.require_subcommand(1);
  CommonArgs args;

  add_stage(app, args, "run", "full pipeline: prepare-data through report",
            [](const ultr::ExperimentConfig& cfg) {
              std::cout << ultr::run_pipeline(cfg) << "\n";
            });
  add_stage(app, args, "prepare-data",
            "load, scale and persist the dataset splits",
            [](const ultr::ExperimentConfig& cfg) {
              ultr::stage_prepare(cfg);
            });
  add_stage(app, args, "train-logging",
            "train the logging policy on a fraction of the train queries",
            [](const ultr::ExperimentConfig& cfg) {
              ultr::stage_train_logging(cfg);
            });

  std::size_t n_clicks = 0;
  CLI::App* simulate = add_stage(
      app, args, "simulate", "generate the click log under the logging policy",
      [](const ultr::ExperimentConfig& cfg) { ultr::stage_simulate(cfg); });
  simulate->add_option("--n-clicks", n_clicks, "click budget override")
      ->check(CLI::PositiveNumber);
  simulate->parse_complete_callback([&args, &n_clicks, simulate] {
    if (simulate->count("--n-clicks") > 0) {
      args.sets.push_back("n_clicks=" + std::to_string(n_clicks));
    }
  });

  add_stage(app, args, "estimate",
            "compute debiased training targets for every grid cell",
            [](const ultr::ExperimentConfig& cfg) {
              ultr::stage_estimate(cfg);
            });
  add_stage(app, args, "train",
            "train rankers on the estimated targets, one per seed",
            [](const ultr::ExperimentConfig& cfg) { ultr::stage_train(cfg); });
  add_stage(app, args, "evaluate",
            "score the trained rankers on the test split",
            [](const ultr::ExperimentConfig& cfg) {
              ultr::stage_evaluate(cfg);
            });

  std::string reference;
  bool paired = false;
  CLI::App* report = add_stage(
      app, args, "report",
      "aggregate runs and mark significance against a reference",
      [](const ultr::ExperimentConfig& cfg) {
        ultr::stage_report(cfg);
        std::ifstream in(ultr::RunPaths(cfg).report(), std::ios::binary);
        std::cout << in.rdbuf();
      });
  report->add_option("--reference", reference,
                     "reference estimator override");
  report->add_flag("--paired", paired, "paired t-test across seeds");
  report->parse_complete_callback([&args, &reference, &paired, report] {
    if (report->count("--reference") > 0) {
      args.sets.push_back("reference=" + reference);
    }
    if (paired) args.sets.push_back("paired=true");
  });

  std::string hist_input;
  std::string hist_output;
  CLI::App* histogram = app.add_subcommand(
      "histogram", "documents-per-query histogram of a dataset file");
  histogram->add_option("--input", hist_input, "dataset in LETOR format")
      ->required();
  histogram->add_option("--output", hist_output,
                        "target CSV (default: stdout)");
  histogram->callback([&hist_input, &hist_output] {
    const ultr::Dataset ds = ultr::load_letor_file(hist_input);
    const auto hist = ultr::query_doc_histogram(ds);
    if (hist_output.empty()) {
      ultr::write_histogram_csv(hist, std::cout);
    } else {
      std::ofstream out(hist_output, std::ios::binary);
      if (!out) throw ultr::ConfigError("cannot open " + hist_output);
      ultr::write_histogram_csv(hist, out);
    }
  });

  std::string fixture_dir;
  ultr::SyntheticConfig synth;
  std::size_t validation_queries = 15;
  std::size_t test_queries = 15;
  CLI::App* fixture = app.add_subcommand(
      "gen-fixture", "write a clustered synthetic train/validation/test "
                     "fixture in LETOR format");
  fixture->add_option("--output-dir", fixture_dir, "target directory")
      ->required();
  fixture->add_option("--queries", synth.n_queries, "train queries");
  fixture->add_option("--validation", validation_queries,
                      "validation queries");
  fixture->add_option("--test", test_queries, "test queries");
  fixture->add_option("--docs", synth.docs_per_query, "documents per query");
  fixture->add_option("--grade-counts", synth.grade_counts,
                      "documents per grade 0..4; must sum to --docs")
      ->expected(5);
  fixture->add_option("--feature-dim", synth.feature_dim,
                      "feature count (>= 8)");
  fixture->add_option("--noise", synth.signal_noise,
                      "signal dimension noise");
  fixture->add_option("--spread", synth.cluster_spread, "cluster jitter");
  fixture->add_option("--seed", synth.seed, "base seed");
  fixture->callback([&fixture_dir, &synth, &validation_queries,
                     &test_queries] {
    std::filesystem::create_directories(fixture_dir);
    const auto paths = ultr::write_fixture(fixture_dir, synth,
                                           validation_queries, test_queries);
    for (const auto& p : paths) std::cout << p << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "ultrbench: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
