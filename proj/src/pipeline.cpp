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
#include "ultr/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ultr/click_sim.hpp"
#include "ultr/common.hpp"
#include "ultr/eval.hpp"
#include "ultr/letor.hpp"
#include "ultr/ranker.hpp"
#include "ultr/scorer.hpp"
#include "ultr/similarity.hpp"

namespace ultr {
namespace {

namespace fs = std::filesystem;

void require_input(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw PipelineError("missing " + what + ": " + path);
  }
}

void require_artifact(const std::string& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw PipelineError("missing artifact " + path + "; run the " + producer +
                        " stage first");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot open " + path + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out.good()) throw PipelineError("failed to write " + path);
}

// Creates the run directory and echoes the resolved configuration so a run
// is self-describing. Idempotent; every stage entry point calls it.
RunPaths ensure_run_dir(const ExperimentConfig& cfg) {
  RunPaths paths(cfg);
  fs::create_directories(paths.dir);
  std::string echoed = resolved_text(cfg);
  std::ofstream out = open_out(paths.resolved_config());
  out << echoed;
  finish_out(out, paths.resolved_config());
  return paths;
}

Dataset load_prepared(const RunPaths& paths, Split split,
                      const std::string& producer) {
  const std::string path = paths.dataset(split);
  require_artifact(path, producer);
  return load_letor_file(path, split);
}

TrainConfig ranker_train_config(const ExperimentConfig& cfg,
                                std::uint64_t seed) {
  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.seed = seed;
  tc.objective = Objective::kPolicyGradient;
  tc.pl_samples = cfg.pl_samples;
  tc.top_n = cfg.top_n;
  tc.threads = static_cast<int>(cfg.threads);
  return tc;
}

EstimatorConfig cell_estimator_config(const ExperimentConfig& cfg,
                                      const GridCell& cell) {
  EstimatorConfig ec;
  ec.kind = cell.kind;
  ec.alpha = cell.alpha;
  if (cell.similarity != "-") {
    ec.similarity.measure = parse_measure(cell.similarity);
  }
  ec.similarity.lambda = cfg.lambda;
  ec.similarity.top_set_size =
      cell.top_set > 0 ? cell.top_set : cfg.top_sets.front();
  ec.similarity.strict_exclusion = cfg.strict_exclusion;
  ec.tau = cfg.tau;
  ec.n_clicks = cfg.n_clicks;
  ec.regression.objective = Objective::kSupervised;
  ec.regression.epochs = cfg.regression_epochs;
  ec.regression.learning_rate = cfg.learning_rate;
  ec.regression.seed = cfg.base_seed;
  ec.regression.top_n = cfg.top_n;
  ec.regression.threads = static_cast<int>(cfg.threads);
  ec.threads = cfg.threads;
  return ec;
}

void run_stage(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError("stage " + name + ": " + e.what());
  }
}

}  // namespace

std::string GridCell::label() const {
  std::string s = estimator_name(kind);
  if (similarity != "-") s += "_" + similarity;
  if (kind == EstimatorKind::kIpssim) {
    s += "_T" + std::to_string(top_set);
    s += "_a";
    append_double(s, alpha);
  }
  return s;
}

std::vector<GridCell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridCell> cells;
  for (const std::string& name : cfg.estimators) {
    GridCell base;
    base.kind = parse_estimator(name);
    if (base.kind == EstimatorKind::kIpssim) {
      for (const std::string& sim : cfg.similarities) {
        for (std::size_t t : cfg.top_sets) {
          for (double a : cfg.alphas) {
            GridCell c = base;
            c.similarity = sim;
            c.top_set = t;
            c.alpha = a;
            cells.push_back(c);
          }
        }
      }
    } else if (uses_similarity(base.kind)) {
      for (const std::string& sim : cfg.similarities) {
        GridCell c = base;
        c.similarity = sim;
        cells.push_back(c);
      }
    } else {
      cells.push_back(base);
    }
  }
  return cells;
}

RunPaths::RunPaths(const ExperimentConfig& cfg)
    : dir(cfg.output_dir + "/run-" + config_stamp(cfg)) {}

std::string RunPaths::resolved_config() const {
  return dir + "/resolved_config.txt";
}

std::string RunPaths::dataset(Split split) const {
  return dir + "/" + split_name(split) + ".txt";
}

std::string RunPaths::scaling_stats() const {
  return dir + "/scaling_stats.txt";
}

std::string RunPaths::logging_policy() const {
  return dir + "/logging_policy.txt";
}

std::string RunPaths::clicks() const { return dir + "/clicks.csv"; }

std::string RunPaths::targets(const GridCell& cell) const {
  return dir + "/targets_" + cell.label() + ".csv";
}

std::string RunPaths::scorer(const GridCell& cell, std::size_t run) const {
  return dir + "/scorer_" + cell.label() + "_run" + std::to_string(run) +
         ".txt";
}

std::string RunPaths::loss(const GridCell& cell, std::size_t run) const {
  return dir + "/loss_" + cell.label() + "_run" + std::to_string(run) + ".csv";
}

std::string RunPaths::runs() const { return dir + "/runs.csv"; }

std::string RunPaths::report() const { return dir + "/report.csv"; }

void stage_prepare(const ExperimentConfig& cfg) {
  run_stage("prepare", [&] {
    require_input(cfg.train_path, "train dataset");
    require_input(cfg.validation_path, "validation dataset");
    require_input(cfg.test_path, "test dataset");
    RunPaths paths = ensure_run_dir(cfg);

    // The train split defines the feature space; the other splits must fit
    // inside it or parsing rejects them.
    Dataset train =
        load_letor_file(cfg.train_path, Split::kTrain, cfg.feature_dim);
    Dataset validation = load_letor_file(cfg.validation_path,
                                         Split::kValidation, train.feature_dim);
    Dataset test =
        load_letor_file(cfg.test_path, Split::kTest, train.feature_dim);
    if (cfg.scale) {
      ScalingStats stats = compute_scaling_stats(train);
      train = scale_features(train, stats);
      validation = scale_features(validation, stats);
      test = scale_features(test, stats);
      save_scaling_stats(stats, paths.scaling_stats());
    }
    save_letor_file(train, paths.dataset(Split::kTrain));
    save_letor_file(validation, paths.dataset(Split::kValidation));
    save_letor_file(test, paths.dataset(Split::kTest));
  });
}

void stage_train_logging(const ExperimentConfig& cfg) {
  run_stage("train-logging", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    Dataset train = load_prepared(paths, Split::kTrain, "prepare");
    TrainConfig tc = ranker_train_config(cfg, cfg.base_seed);
    tc.epochs = cfg.logging_epochs;
    Scorer policy = train_logging_policy(train, cfg.logging_fraction, tc);
    save_scorer(policy, paths.logging_policy());
  });
}

void stage_simulate(const ExperimentConfig& cfg) {
  run_stage("simulate", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    Dataset train = load_prepared(paths, Split::kTrain, "prepare");
    require_artifact(paths.logging_policy(), "train-logging");
    Scorer policy = load_scorer(paths.logging_policy());

    SimConfig sc;
    sc.target_clicks = cfg.n_clicks;
    sc.top_n = cfg.top_n;
    sc.seed = cfg.base_seed;
    sc.threads = cfg.threads;
    ClickLog log = simulate_clicks(train, policy, sc);
    save_click_log(log, train, paths.clicks());
  });
}

void stage_estimate(const ExperimentConfig& cfg) {
  run_stage("estimate", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    Dataset train = load_prepared(paths, Split::kTrain, "prepare");
    require_artifact(paths.clicks(), "simulate");
    ClickLog log = load_click_log(paths.clicks(), train);

    for (const GridCell& cell : expand_grid(cfg)) {
      EstimatorConfig ec = cell_estimator_config(cfg, cell);
      TargetsResult res = compute_targets(log, train, ec);
      if (res.flagged_zero_weight > 0) {
        std::cerr << "warning: " << cell.label() << ": "
                  << res.flagged_zero_weight
                  << " single-document impressions carry zero weight\n";
      }
      save_targets(res.targets, train, paths.targets(cell));
    }
  });
}

void stage_train(const ExperimentConfig& cfg) {
  run_stage("train", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    Dataset train = load_prepared(paths, Split::kTrain, "prepare");

    for (const GridCell& cell : expand_grid(cfg)) {
      require_artifact(paths.targets(cell), "estimate");
      TargetTable targets = load_targets(paths.targets(cell), train);
      for (std::size_t r = 0; r < cfg.seeds; ++r) {
        TrainConfig tc = ranker_train_config(cfg, cfg.base_seed + r);
        TrainResult result = train_ranker(train, targets, tc);
        save_scorer(result.scorer, paths.scorer(cell, r));
        std::ofstream out = open_out(paths.loss(cell, r));
        write_loss_csv(result.trajectory, out);
        finish_out(out, paths.loss(cell, r));
      }
    }
  });
}

void stage_evaluate(const ExperimentConfig& cfg) {
  run_stage("evaluate", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    Dataset test = load_prepared(paths, Split::kTest, "prepare");

    std::vector<RunResult> runs;
    for (const GridCell& cell : expand_grid(cfg)) {
      for (std::size_t r = 0; r < cfg.seeds; ++r) {
        require_artifact(paths.scorer(cell, r), "train");
        Scorer s = load_scorer(paths.scorer(cell, r));
        RunResult row;
        row.dataset = cfg.dataset_name;
        row.estimator = estimator_name(cell.kind);
        row.similarity = cell.similarity;
        row.top_set = cell.top_set;
        row.alpha = cell.alpha;
        row.n_clicks = cfg.n_clicks;
        row.top_n = cfg.top_n;
        row.run_id = r;
        row.ndcg = evaluate_scorer(s, test, cfg.top_n,
                                   static_cast<int>(cfg.threads));
        runs.push_back(row);
      }
    }
    std::ofstream out = open_out(paths.runs());
    write_runs_csv(runs, out);
    finish_out(out, paths.runs());
  });
}

void stage_report(const ExperimentConfig& cfg) {
  run_stage("report", [&] {
    RunPaths paths = ensure_run_dir(cfg);
    require_artifact(paths.runs(), "evaluate");
    std::ifstream in(paths.runs(), std::ios::binary);
    if (!in) throw PipelineError("cannot open " + paths.runs());
    std::vector<RunResult> runs = read_runs_csv(in);
    std::string report = render_report(runs, cfg.reference, cfg.paired);
    std::ofstream out = open_out(paths.report());
    out << report;
    finish_out(out, paths.report());
  });
}

std::string run_pipeline(const ExperimentConfig& cfg) {
  stage_prepare(cfg);
  stage_train_logging(cfg);
  stage_simulate(cfg);
  stage_estimate(cfg);
  stage_train(cfg);
  stage_evaluate(cfg);
  stage_report(cfg);
  return RunPaths(cfg).dir;
}

}  // namespace ultr
