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
#include "ultr/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "ultr/common.hpp"
#include "ultr/eval.hpp"
#include "ultr/parallel.hpp"

namespace ultr {

namespace {

constexpr std::size_t kQueryBlock = 8;

void check_targets(const Dataset& ds, const TargetTable& targets) {
  if (targets.size() != ds.queries.size()) {
    throw ValidationError("target table has " +
                          std::to_string(targets.size()) + " queries, dataset " +
                          std::to_string(ds.queries.size()));
  }
  for (std::size_t q = 0; q < targets.size(); ++q) {
    if (targets[q].size() != ds.queries[q].docs.size()) {
      throw ValidationError("target table shape mismatch at query " +
                            ds.queries[q].query_id);
    }
  }
}

double discount(std::size_t position) {  // 1-based
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

}  // namespace

TargetTable relevance_targets(const Dataset& ds) {
  TargetTable t(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    t[q].resize(ds.queries[q].docs.size());
    for (std::size_t d = 0; d < t[q].size(); ++d) {
      t[q][d] = normalize_relevance(ds.queries[q].docs[d].rel);
    }
  }
  return t;
}

std::vector<std::size_t> pl_sample(const std::vector<double>& scores,
                                   Rng& rng) {
  std::vector<double> keys(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    keys[i] = scores[i] + rng.next_gumbel();
  }
  return rank_by_score(keys);
}

double pl_log_prob(const std::vector<double>& scores,
                   const std::vector<std::size_t>& ranking,
                   std::size_t cutoff) {
  const std::size_t m = ranking.size();
  const std::size_t steps = std::min(cutoff, m);
  double logp = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    double mx = scores[ranking[k]];
    for (std::size_t j = k; j < m; ++j) mx = std::max(mx, scores[ranking[j]]);
    double z = 0.0;
    for (std::size_t j = k; j < m; ++j) z += std::exp(scores[ranking[j]] - mx);
    logp += scores[ranking[k]] - mx - std::log(z);
  }
  return logp;
}

std::vector<double> pl_log_prob_grad(const std::vector<double>& scores,
                                     const std::vector<std::size_t>& ranking,
                                     std::size_t cutoff) {
  const std::size_t m = ranking.size();
  const std::size_t steps = std::min(cutoff, m);
  std::vector<double> grad(scores.size(), 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    grad[ranking[k]] += 1.0;
    double mx = scores[ranking[k]];
    for (std::size_t j = k; j < m; ++j) mx = std::max(mx, scores[ranking[j]]);
    double z = 0.0;
    for (std::size_t j = k; j < m; ++j) z += std::exp(scores[ranking[j]] - mx);
    for (std::size_t j = k; j < m; ++j) {
      grad[ranking[j]] -= std::exp(scores[ranking[j]] - mx) / z;
    }
  }
  return grad;
}

double ranking_utility(const std::vector<std::size_t>& ranking,
                       const std::vector<double>& targets, std::size_t top_n) {
  const std::size_t steps = std::min(top_n, ranking.size());
  double u = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    u += targets[ranking[k]] * discount(k + 1);
  }
  return u;
}

namespace {

void enumerate_permutations(
    std::size_t m, const std::function<void(const std::vector<std::size_t>&)>&
                       visit) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    visit(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

double pl_prob(const std::vector<double>& scores,
               const std::vector<std::size_t>& ranking) {
  return std::exp(pl_log_prob(scores, ranking, ranking.size()));
}

}  // namespace

double pl_expected_utility(const std::vector<double>& scores,
                           const std::vector<double>& targets,
                           std::size_t top_n) {
  if (scores.size() > 8) {
    throw ValidationError("permutation enumeration limited to 8 documents");
  }
  double eu = 0.0;
  enumerate_permutations(scores.size(), [&](const auto& perm) {
    eu += pl_prob(scores, perm) * ranking_utility(perm, targets, top_n);
  });
  return eu;
}

std::vector<double> pl_expected_utility_grad(const std::vector<double>& scores,
                                             const std::vector<double>& targets,
                                             std::size_t top_n) {
  if (scores.size() > 8) {
    throw ValidationError("permutation enumeration limited to 8 documents");
  }
  std::vector<double> grad(scores.size(), 0.0);
  enumerate_permutations(scores.size(), [&](const auto& perm) {
    const double w =
        pl_prob(scores, perm) * ranking_utility(perm, targets, top_n);
    const auto g = pl_log_prob_grad(scores, perm, perm.size());
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += w * g[i];
  });
  return grad;
}

namespace {

// Per-query REINFORCE estimate of d(expected utility)/d(scores) with a
// leave-one-out baseline across the sampled rankings.
std::vector<double> policy_gradient_scores(const std::vector<double>& scores,
                                           const std::vector<double>& targets,
                                           const TrainConfig& cfg, Rng& rng,
                                           double* mean_utility) {
  const std::size_t s_count = std::max<std::size_t>(1, cfg.pl_samples);
  std::vector<std::vector<std::size_t>> samples(s_count);
  std::vector<double> utils(s_count);
  double total = 0.0;
  for (std::size_t s = 0; s < s_count; ++s) {
    samples[s] = pl_sample(scores, rng);
    utils[s] = ranking_utility(samples[s], targets, cfg.top_n);
    total += utils[s];
  }
  if (mean_utility) *mean_utility = total / static_cast<double>(s_count);

  std::vector<double> grad(scores.size(), 0.0);
  for (std::size_t s = 0; s < s_count; ++s) {
    const double baseline =
        s_count > 1 ? (total - utils[s]) / static_cast<double>(s_count - 1)
                    : 0.0;
    const double adv = utils[s] - baseline;
    if (adv == 0.0) continue;
    const auto g = pl_log_prob_grad(scores, samples[s], cfg.top_n);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] += adv * g[i] / static_cast<double>(s_count);
    }
  }
  return grad;
}

struct BlockScratch {
  ScorerGrad grad;
  double loss = 0.0;
};

}  // namespace

TrainResult train_ranker(const Dataset& ds, const TargetTable& targets,
                         const TrainConfig& cfg, const Dataset* validation) {
  if (ds.queries.empty()) throw ValidationError("training on an empty dataset");
  if (cfg.learning_rate <= 0.0) {
    throw ValidationError("learning rate must be positive");
  }
  check_targets(ds, targets);

  // The policy-gradient utility is linear in the targets, so their overall
  // scale multiplies the step size. Debiased target scales differ by orders
  // of magnitude across estimators (inverse propensities reach 1/tau);
  // normalizing the mean nonzero magnitude to 1 keeps a single learning
  // rate comparable across estimators. Supervised regression keeps the raw
  // scale: its predictions are read back as calibrated values.
  const TargetTable* train_targets = &targets;
  TargetTable scaled;
  if (cfg.objective == Objective::kPolicyGradient) {
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (const auto& row : targets) {
      for (const double v : row) {
        if (v != 0.0) {
          sum += std::abs(v);
          ++nonzero;
        }
      }
    }
    if (nonzero > 0 && sum > 0.0) {
      const double scale = static_cast<double>(nonzero) / sum;
      if (scale != 1.0) {
        scaled = targets;
        for (auto& row : scaled) {
          for (double& v : row) v *= scale;
        }
        train_targets = &scaled;
      }
    }
  }

  TrainResult result;
  result.scorer = make_scorer(ds.feature_dim, cfg.seed);
  const std::size_t n_queries = ds.queries.size();
  const std::size_t batch =
      cfg.batch == 0 ? n_queries : std::min(cfg.batch, n_queries);
  const std::size_t n_blocks = (n_queries + kQueryBlock - 1) / kQueryBlock;
  std::vector<BlockScratch> scratch(n_blocks);
  for (auto& s : scratch) s.grad = make_grad(result.scorer);
  ScorerGrad step_grad = make_grad(result.scorer);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    CompensatedSum epoch_loss;
    for (std::size_t batch_start = 0; batch_start < n_queries;
         batch_start += batch) {
      const std::size_t batch_end = std::min(batch_start + batch, n_queries);
      const std::size_t batch_size = batch_end - batch_start;

      // Fixed-size query blocks keep gradient accumulation independent of
      // the worker count; block buffers are reduced in block order below.
      parallel_blocks(
          batch_size, kQueryBlock,
          [&](std::size_t block, std::size_t begin, std::size_t end) {
            BlockScratch& sc = scratch[block];
            zero_grad(sc.grad);
            sc.loss = 0.0;
            ForwardPad pad(result.scorer);
            for (std::size_t bq = begin; bq < end; ++bq) {
              const std::size_t qi = batch_start + bq;
              const QueryGroup& q = ds.queries[qi];
              std::vector<double> scores(q.docs.size());
              for (std::size_t d = 0; d < q.docs.size(); ++d) {
                scores[d] = pad.forward(result.scorer,
                                        q.docs[d].features.data(),
                                        q.docs[d].features.size());
              }
              std::vector<double> dscores(q.docs.size(), 0.0);
              if (cfg.objective == Objective::kPolicyGradient) {
                // Substream keyed by (epoch, query) so results do not
                // depend on scheduling.
                Rng rng(cfg.seed, 1 + epoch * n_queries + qi);
                double mean_u = 0.0;
                const auto g = policy_gradient_scores(
                    scores, (*train_targets)[qi], cfg, rng, &mean_u);
                sc.loss += -mean_u;
                // Ascent on utility = descent on -utility.
                for (std::size_t d = 0; d < dscores.size(); ++d) {
                  dscores[d] = -g[d];
                }
              } else {
                for (std::size_t d = 0; d < dscores.size(); ++d) {
                  const double err = scores[d] - targets[qi][d];
                  sc.loss += err * err;
                  dscores[d] = 2.0 * err;
                }
              }
              for (std::size_t d = 0; d < q.docs.size(); ++d) {
                if (dscores[d] == 0.0) continue;
                pad.forward(result.scorer, q.docs[d].features.data(),
                            q.docs[d].features.size());
                pad.backward(result.scorer, dscores[d], sc.grad);
              }
            }
          },
          cfg.threads);

      zero_grad(step_grad);
      const std::size_t used_blocks =
          (batch_size + kQueryBlock - 1) / kQueryBlock;
      const double scale = 1.0 / static_cast<double>(batch_size);
      for (std::size_t b = 0; b < used_blocks; ++b) {
        add_grad(step_grad, scratch[b].grad, scale);
        epoch_loss.add(scratch[b].loss);
      }
      apply_update(result.scorer, step_grad, cfg.learning_rate);
    }

    const double loss = epoch_loss.value() / static_cast<double>(n_queries);
    if (!std::isfinite(loss) || !finite_params(result.scorer)) {
      throw ValidationError("non-finite loss at epoch " +
                            std::to_string(epoch + 1) +
                            "; lower the learning rate");
    }
    LossPoint pt;
    pt.epoch = epoch + 1;
    pt.loss = loss;
    pt.val_ndcg = validation
                      ? evaluate_scorer(result.scorer, *validation, cfg.top_n,
                                        cfg.threads)
                      : std::numeric_limits<double>::quiet_NaN();
    result.trajectory.push_back(pt);
  }
  return result;
}

void write_loss_csv(const std::vector<LossPoint>& trajectory,
                    std::ostream& out) {
  out << "epoch,loss,val_ndcg\n";
  std::string buf;
  for (const LossPoint& pt : trajectory) {
    buf = std::to_string(pt.epoch);
    buf += ',';
    append_double(buf, pt.loss);
    buf += ',';
    if (!std::isnan(pt.val_ndcg)) append_double(buf, pt.val_ndcg);
    buf += '\n';
    out << buf;
  }
}

AlphaSearchResult grid_search_alpha(
    const Dataset& train,
    const std::function<TargetTable(double)>& targets_for_alpha,
    const std::vector<double>& alphas, const Dataset& validation,
    const TrainConfig& cfg) {
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  if (validation.queries.empty()) {
    throw ConfigError("alpha search needs a non-empty validation set");
  }
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  AlphaSearchResult res;
  double best = -1.0;
  for (double alpha : sorted) {
    const TrainResult tr = train_ranker(train, targets_for_alpha(alpha), cfg);
    const double ndcg =
        evaluate_scorer(tr.scorer, validation, cfg.top_n, cfg.threads);
    res.table.emplace_back(alpha, ndcg);
    if (ndcg > best) {  // strict: ties keep the earlier (smaller) alpha
      best = ndcg;
      res.best_alpha = alpha;
    }
  }
  return res;
}

}  // namespace ultr
