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
#ifndef ULTR_RANKER_HPP_
#define ULTR_RANKER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ultr/letor.hpp"
#include "ultr/rng.hpp"
#include "ultr/scorer.hpp"

// Training of the MLP scorer. The main objective is a Plackett-Luce policy
// gradient: rankings are sampled by Gumbel perturbation of the scores, the
// utility of a sample is the DCG-weighted sum of per-document targets over
// the top-n prefix, and REINFORCE with a leave-one-out baseline estimates
// the score gradient. A plain supervised MSE objective is also provided;
// the doubly robust estimators reuse it for their regression model.

namespace ultr {

enum class Objective { kSupervised, kPolicyGradient };

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 100;
  std::size_t batch = 0;  // queries per update; 0 means one update per epoch
  std::uint64_t seed = 1;
  Objective objective = Objective::kPolicyGradient;
  std::size_t pl_samples = 10;  // sampled rankings per query per update
  std::size_t top_n = 10;       // utility cutoff (and validation NDCG cutoff)
  int threads = 0;
};

// targets[q][d] aligned with dataset.queries[q].docs[d]; values may be
// negative under noisy debiased estimates and are used as-is.
using TargetTable = std::vector<std::vector<double>>;

/// Normalized relevance grades as targets (logging-policy training).
TargetTable relevance_targets(const Dataset& ds);

// Plackett-Luce primitives, exposed for the gradient checks.

/// Full permutation sampled by descending (score + Gumbel noise).
std::vector<std::size_t> pl_sample(const std::vector<double>& scores,
                                   Rng& rng);

/// log P of the first min(cutoff, m) choices of the permutation.
double pl_log_prob(const std::vector<double>& scores,
                   const std::vector<std::size_t>& ranking,
                   std::size_t cutoff);

/// d(pl_log_prob)/d(scores).
std::vector<double> pl_log_prob_grad(const std::vector<double>& scores,
                                     const std::vector<std::size_t>& ranking,
                                     std::size_t cutoff);

/// Sum over the top-n prefix of target / log2(position + 1).
double ranking_utility(const std::vector<std::size_t>& ranking,
                       const std::vector<double>& targets, std::size_t top_n);

/// Exact E[utility] under the Plackett-Luce policy by enumerating all
/// permutations; supports at most 8 documents.
double pl_expected_utility(const std::vector<double>& scores,
                           const std::vector<double>& targets,
                           std::size_t top_n);

/// Exact gradient of pl_expected_utility via the policy-gradient identity.
std::vector<double> pl_expected_utility_grad(const std::vector<double>& scores,
                                             const std::vector<double>& targets,
                                             std::size_t top_n);

struct LossPoint {
  std::size_t epoch;
  double loss;
  double val_ndcg;  // NaN when no validation set was supplied
};

struct TrainResult {
  Scorer scorer;
  std::vector<LossPoint> trajectory;
};

/// Trains a fresh scorer against the targets. Deterministic given cfg.seed,
/// independent of cfg.threads. Aborts with ValidationError on non-finite
/// loss or parameters. Under the policy-gradient objective the targets are
/// scale-normalized internally (mean nonzero magnitude 1) so the step size
/// does not depend on the estimator's raw weight scale; reported losses use
/// the normalized scale. The supervised objective uses targets as-is.
TrainResult train_ranker(const Dataset& ds, const TargetTable& targets,
                         const TrainConfig& cfg,
                         const Dataset* validation = nullptr);

void write_loss_csv(const std::vector<LossPoint>& trajectory,
                    std::ostream& out);

struct AlphaSearchResult {
  double best_alpha = 0.0;
  // (alpha, mean validation NDCG) in candidate order.
  std::vector<std::pair<double, double>> table;
};

/// Trains one ranker per candidate alpha and picks the best validation
/// NDCG@top_n, ties broken toward the smaller alpha.
AlphaSearchResult grid_search_alpha(
    const Dataset& train,
    const std::function<TargetTable(double)>& targets_for_alpha,
    const std::vector<double>& alphas, const Dataset& validation,
    const TrainConfig& cfg);

}  // namespace ultr

#endif  // ULTR_RANKER_HPP_
