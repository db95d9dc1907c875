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
#ifndef ULTR_EVAL_HPP_
#define ULTR_EVAL_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ultr/letor.hpp"
#include "ultr/scorer.hpp"

namespace ultr {

/// NDCG@n with gain 2^rel - 1 and discount log2(k+1) on raw integer grades,
/// in presentation order. A zero ideal DCG (all grades 0) scores 0.
double ndcg_at_n(const std::vector<int>& ranked_grades, std::size_t n);

/// Variant with an explicit ideal ordering (grades sorted descending),
/// for rankings truncated before all documents appear.
double ndcg_at_n(const std::vector<int>& ranked_grades,
                 const std::vector<int>& ideal_grades, std::size_t n);

/// Mean NDCG@n of the scorer's rankings over all queries of the dataset.
double evaluate_scorer(const Scorer& s, const Dataset& ds, std::size_t n,
                       int threads = 0);

struct Aggregate {
  double mean = 0.0;
  std::optional<double> std;  // sample std; undefined for a single run
};

/// Mean and sample standard deviation over repeated runs.
Aggregate aggregate_runs(const std::vector<double>& values);

/// Two-sided p-value. Unpaired is Welch's unequal-variance form; paired
/// tests the per-seed differences. Degenerate zero-variance inputs: equal
/// means give p = 1, different means give p = 0.
double t_test(const std::vector<double>& a, const std::vector<double>& b,
              bool paired = false);

struct RunResult {
  std::string dataset;
  std::string estimator;
  std::string similarity;  // "-" for estimators without a similarity term
  std::size_t top_set = 0;
  double alpha = 0.0;
  std::size_t n_clicks = 0;
  std::size_t top_n = 0;
  std::size_t run_id = 0;
  double ndcg = 0.0;
};

/// Aggregates runs into one row per configuration and marks significance
/// against the reference estimator's row at the same (dataset, n_clicks,
/// top_n): "▲" better / "▼" worse at p < 0.05, "none" otherwise.
std::string render_report(const std::vector<RunResult>& runs,
                          const std::string& reference_estimator,
                          bool paired = false);

// Per-run rows persisted between the evaluate and report stages.
void write_runs_csv(const std::vector<RunResult>& runs, std::ostream& out);
std::vector<RunResult> read_runs_csv(std::istream& in);

}  // namespace ultr

#endif  // ULTR_EVAL_HPP_
