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
#include "ultr/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "ultr/click_model.hpp"
#include "ultr/common.hpp"
#include "ultr/rng.hpp"

namespace ultr {

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "naive") return EstimatorKind::kNaive;
  if (name == "ips") return EstimatorKind::kIps;
  if (name == "ipssim") return EstimatorKind::kIpssim;
  if (name == "mips_ltr") return EstimatorKind::kMipsLtr;
  if (name == "dr") return EstimatorKind::kDr;
  if (name == "drm") return EstimatorKind::kDrm;
  if (name == "rps") return EstimatorKind::kRps;
  throw ConfigError("unknown estimator '" + name + "'");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kIps: return "ips";
    case EstimatorKind::kIpssim: return "ipssim";
    case EstimatorKind::kMipsLtr: return "mips_ltr";
    case EstimatorKind::kDr: return "dr";
    case EstimatorKind::kDrm: return "drm";
    case EstimatorKind::kRps: return "rps";
  }
  throw ConfigError("unknown estimator kind");
}

bool uses_similarity(EstimatorKind kind) {
  return kind == EstimatorKind::kIpssim || kind == EstimatorKind::kMipsLtr ||
         kind == EstimatorKind::kDrm;
}

void validate_estimator_config(const EstimatorConfig& cfg) {
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
    throw ConfigError("alpha must be in [0, 1]");
  }
  if (cfg.tau < 0.0) throw ConfigError("tau must be positive");
}

double resolve_tau(const EstimatorConfig& cfg, std::size_t log_clicks) {
  if (cfg.tau > 0.0) return cfg.tau;
  const std::size_t n = cfg.n_clicks > 0 ? cfg.n_clicks : log_clicks;
  return default_tau(n);
}

std::vector<WeightTerms> derive_propensity_terms(std::size_t page_len,
                                                 double tau) {
  std::vector<WeightTerms> terms(page_len);
  for (std::size_t k = 0; k < page_len; ++k) {
    const PropensityTerms p = propensity_at(k + 1);
    terms[k].rho_raw = p.rho_hat;
    terms[k].rho_hat = clip_propensity(p.rho_hat, tau);
    terms[k].eps_hat = p.eps_hat;
  }
  return terms;
}

namespace {

// Pages and session counts per query; the toolkit logs deterministically,
// so every session of a query must show the same page.
struct QueryPages {
  std::vector<std::vector<std::int32_t>> page;
  std::vector<std::size_t> sessions;
};

QueryPages collect_pages(const ClickLog& log, const Dataset& ds) {
  QueryPages qp;
  qp.page.resize(ds.queries.size());
  qp.sessions.assign(ds.queries.size(), 0);
  for (const Session& s : log.sessions) {
    if (s.query_index >= ds.queries.size()) {
      throw ValidationError("session references query index " +
                            std::to_string(s.query_index));
    }
    const std::size_t n_docs = ds.queries[s.query_index].docs.size();
    for (const auto d : s.ranking) {
      if (d < 0 || static_cast<std::size_t>(d) >= n_docs) {
        throw ValidationError("session references doc index " +
                              std::to_string(d));
      }
    }
    if (qp.sessions[s.query_index] == 0) {
      qp.page[s.query_index] = s.ranking;
    } else if (qp.page[s.query_index] != s.ranking) {
      throw ValidationError(
          "query '" + ds.queries[s.query_index].query_id +
          "' has sessions with different pages; estimators assume a "
          "deterministic logging policy");
    }
    ++qp.sessions[s.query_index];
  }
  return qp;
}

std::vector<std::size_t> to_index_ranking(
    const std::vector<std::int32_t>& page) {
  std::vector<std::size_t> r(page.size());
  for (std::size_t i = 0; i < page.size(); ++i) {
    r[i] = static_cast<std::size_t>(page[i]);
  }
  return r;
}

// Memoizes derive_propensity_terms by page length.
class TermsByLen {
 public:
  explicit TermsByLen(double tau) : tau_(tau) {}
  const std::vector<WeightTerms>& of(std::size_t len) {
    if (len >= cache_.size()) cache_.resize(len + 1);
    if (cache_[len].size() != len) cache_[len] = derive_propensity_terms(len, tau_);
    return cache_[len];
  }

 private:
  double tau_;
  std::vector<std::vector<WeightTerms>> cache_;
};

void check_table_shape(const ClickLog& log, std::size_t outer,
                       const std::function<std::size_t(std::size_t)>& inner,
                       const char* what) {
  if (outer != log.sessions.size()) {
    throw ValidationError(std::string(what) + " table has wrong session count");
  }
  for (std::size_t s = 0; s < outer; ++s) {
    if (inner(s) != log.sessions[s].ranking.size()) {
      throw ValidationError(std::string(what) + " table has wrong width at session " +
                            std::to_string(s));
    }
  }
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Regression predictions per (query, doc), clamped to the relevance range.
TargetTable predict_relevance(const Scorer& scorer, const Dataset& ds) {
  TargetTable pred(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    const auto scores = score_group(scorer, ds.queries[q]);
    pred[q].resize(scores.size());
    for (std::size_t d = 0; d < scores.size(); ++d) {
      pred[q][d] = clamp01(scores[d]);
    }
  }
  return pred;
}

}  // namespace

TermsTable derive_terms(const ClickLog& log, const Dataset& ds,
                        const EstimatorConfig& cfg,
                        const Scorer* target_policy) {
  validate_estimator_config(cfg);
  if (log.sessions.empty()) throw ValidationError("empty click log");
  const double tau = resolve_tau(cfg, log.total_clicks);
  const QueryPages qp = collect_pages(log, ds);
  TermsByLen by_len(tau);

  // Per-query avgsim over the logged page and, under a stochastic target
  // policy, the placement probability of each page slot.
  std::vector<std::vector<double>> avg(ds.queries.size());
  std::vector<std::vector<double>> omega(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    if (qp.sessions[q] == 0) continue;
    const auto ranking = to_index_ranking(qp.page[q]);
    const QuerySimilarityCache cache =
        build_similarity_cache(ds.queries[q], ranking, cfg.similarity);
    avg[q] = cache.avg;

    omega[q].assign(ranking.size(), 1.0);
    if (target_policy) {
      const auto scores = score_group(*target_policy, ds.queries[q]);
      if (cfg.omega_samples == 0) {
        const auto target = rank_by_score(scores);
        for (std::size_t k = 0; k < ranking.size(); ++k) {
          omega[q][k] = target[k] == ranking[k] ? 1.0 : 0.0;
        }
      } else {
        std::vector<std::vector<std::size_t>> hits(
            scores.size(), std::vector<std::size_t>(ranking.size(), 0));
        Rng rng(cfg.omega_seed, q);
        for (std::size_t s = 0; s < cfg.omega_samples; ++s) {
          const auto sample = pl_sample(scores, rng);
          for (std::size_t k = 0; k < ranking.size(); ++k) {
            ++hits[sample[k]][k];
          }
        }
        for (std::size_t k = 0; k < ranking.size(); ++k) {
          omega[q][k] = static_cast<double>(hits[ranking[k]][k]) /
                        static_cast<double>(cfg.omega_samples);
        }
      }
    }
  }

  TermsTable terms(log.sessions.size());
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    terms[s] = by_len.of(sess.ranking.size());
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      terms[s][k].omega_hat = omega[sess.query_index][k];
      terms[s][k].avgsim =
          avg[sess.query_index][static_cast<std::size_t>(sess.ranking[k])];
    }
  }
  return terms;
}

double ipssim_weight(const WeightTerms& t, double alpha) {
  return t.omega_hat * ((1.0 - alpha) / t.rho_hat + alpha * t.avgsim);
}

double mips_weight(const std::vector<double>& sim_row,
                   const std::vector<double>& rank_probs,
                   std::size_t self_pos) {
  if (sim_row.size() != rank_probs.size()) {
    throw ValidationError("mips weight inputs disagree on page length");
  }
  if (self_pos >= sim_row.size()) {
    throw ValidationError("mips self position outside the page");
  }
  const std::size_t s = sim_row.size() - 1;
  if (s == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < sim_row.size(); ++j) {
    if (j == self_pos) continue;
    sum += rank_probs[j] * sim_row[j];
  }
  return sum / static_cast<double>(s);
}

std::vector<std::vector<double>> derive_mips_weights(
    const ClickLog& log, const Dataset& ds, const SimilarityConfig& sim,
    std::size_t* flagged) {
  if (log.sessions.empty()) throw ValidationError("empty click log");
  const QueryPages qp = collect_pages(log, ds);

  // Weights depend only on the fixed page, so compute them per query.
  std::vector<std::vector<double>> per_query(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    if (qp.sessions[q] == 0) continue;
    const auto ranking = to_index_ranking(qp.page[q]);
    const QuerySimilarityCache cache =
        build_similarity_cache(ds.queries[q], ranking, sim);
    const std::vector<double> ones(ranking.size(), 1.0);
    per_query[q].resize(ranking.size());
    for (std::size_t k = 0; k < ranking.size(); ++k) {
      per_query[q][k] = mips_weight(cache.sim[ranking[k]], ones, k);
    }
  }

  std::size_t zero_pages = 0;
  std::vector<std::vector<double>> weights(log.sessions.size());
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    weights[s] = per_query[log.sessions[s].query_index];
    if (weights[s].size() == 1) ++zero_pages;
  }
  if (flagged) *flagged = zero_pages;
  return weights;
}

double ipssim_estimate(const ClickLog& log,
                       const std::vector<std::vector<double>>& weights,
                       const std::vector<std::vector<double>>& eps_hats) {
  if (log.sessions.empty()) throw ValidationError("empty click log");
  check_table_shape(log, weights.size(),
                    [&](std::size_t s) { return weights[s].size(); },
                    "weight");
  check_table_shape(log, eps_hats.size(),
                    [&](std::size_t s) { return eps_hats[s].size(); },
                    "eps_hat");
  CompensatedSum total;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      total.add(weights[s][k] * (sess.clicks[k] - eps_hats[s][k]));
    }
  }
  return total.value() / static_cast<double>(log.sessions.size());
}

namespace {

// Shared driver: estimate with a per-impression weight drawn from terms.
template <typename WeightFn>
double weighted_estimate(const ClickLog& log, const TermsTable& terms,
                         WeightFn&& weight) {
  if (log.sessions.empty()) throw ValidationError("empty click log");
  check_table_shape(log, terms.size(),
                    [&](std::size_t s) { return terms[s].size(); }, "terms");
  CompensatedSum total;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const WeightTerms& t = terms[s][k];
      total.add(weight(s, k, t) * (sess.clicks[k] - t.eps_hat));
    }
  }
  return total.value() / static_cast<double>(log.sessions.size());
}

}  // namespace

double ipssim_estimate(const ClickLog& log, const TermsTable& terms,
                       double alpha) {
  return weighted_estimate(log, terms,
                           [alpha](std::size_t, std::size_t,
                                   const WeightTerms& t) {
                             return ipssim_weight(t, alpha);
                           });
}

double ips_estimate(const ClickLog& log, const TermsTable& terms) {
  return weighted_estimate(
      log, terms, [](std::size_t, std::size_t, const WeightTerms& t) {
        return t.omega_hat / t.rho_hat;
      });
}

double mips_estimate(const ClickLog& log,
                     const std::vector<std::vector<double>>& mips_weights,
                     const TermsTable& terms) {
  check_table_shape(log, mips_weights.size(),
                    [&](std::size_t s) { return mips_weights[s].size(); },
                    "mips weight");
  return weighted_estimate(log, terms,
                           [&](std::size_t s, std::size_t k,
                               const WeightTerms& t) {
                             return mips_weights[s][k] / t.rho_hat;
                           });
}

double dr_estimate(const ClickLog& log, const Dataset& ds,
                   const Scorer* regression, const TermsTable& terms) {
  if (!regression) {
    throw ConfigError("dr estimator needs a trained regression model");
  }
  if (log.sessions.empty()) throw ValidationError("empty click log");
  check_table_shape(log, terms.size(),
                    [&](std::size_t s) { return terms[s].size(); }, "terms");
  const TargetTable pred = predict_relevance(*regression, ds);
  CompensatedSum total;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const WeightTerms& t = terms[s][k];
      const double r_hat =
          pred[sess.query_index][static_cast<std::size_t>(sess.ranking[k])];
      const double residual = sess.clicks[k] - t.eps_hat - t.rho_raw * r_hat;
      total.add(t.omega_hat * r_hat +
                t.omega_hat / t.rho_hat * residual);
    }
  }
  return total.value() / static_cast<double>(log.sessions.size());
}

double drm_estimate(const ClickLog& log, const Dataset& ds,
                    const Scorer* regression,
                    const std::vector<std::vector<double>>& mips_weights,
                    const TermsTable& terms) {
  if (!regression) {
    throw ConfigError("drm estimator needs a trained regression model");
  }
  if (log.sessions.empty()) throw ValidationError("empty click log");
  check_table_shape(log, terms.size(),
                    [&](std::size_t s) { return terms[s].size(); }, "terms");
  check_table_shape(log, mips_weights.size(),
                    [&](std::size_t s) { return mips_weights[s].size(); },
                    "mips weight");
  const TargetTable pred = predict_relevance(*regression, ds);
  CompensatedSum total;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const WeightTerms& t = terms[s][k];
      const double r_hat =
          pred[sess.query_index][static_cast<std::size_t>(sess.ranking[k])];
      const double residual = sess.clicks[k] - t.eps_hat - t.rho_raw * r_hat;
      total.add(t.omega_hat * r_hat +
                mips_weights[s][k] / t.rho_hat * residual);
    }
  }
  return total.value() / static_cast<double>(log.sessions.size());
}

double rps_estimate(const ClickLog& log, const TermsTable& terms) {
  if (log.sessions.empty()) throw ValidationError("empty click log");
  check_table_shape(log, terms.size(),
                    [&](std::size_t s) { return terms[s].size(); }, "terms");
  CompensatedSum total;
  CompensatedSum effective;  // session count rescaled by the clip ratio
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    CompensatedSum ratio;
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const WeightTerms& t = terms[s][k];
      if (t.rho_raw <= 0.0) {
        throw ValidationError("rps needs raw propensities in its terms");
      }
      total.add(t.omega_hat / t.rho_hat * (sess.clicks[k] - t.eps_hat));
      ratio.add(t.rho_raw / t.rho_hat);
    }
    effective.add(ratio.value() /
                  static_cast<double>(sess.ranking.size()));
  }
  return total.value() / effective.value();
}

TargetsResult compute_targets(const ClickLog& log, const Dataset& ds,
                              const EstimatorConfig& cfg) {
  validate_estimator_config(cfg);
  if (log.sessions.empty()) throw ValidationError("empty click log");
  const QueryPages qp = collect_pages(log, ds);

  TargetsResult res;
  res.sessions = qp.sessions;
  res.targets.resize(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    res.targets[q].assign(ds.queries[q].docs.size(), 0.0);
  }

  if (cfg.kind == EstimatorKind::kNaive) {
    for (const Session& sess : log.sessions) {
      for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
        res.targets[sess.query_index][static_cast<std::size_t>(
            sess.ranking[k])] += sess.clicks[k];
      }
    }
    for (std::size_t q = 0; q < ds.queries.size(); ++q) {
      if (qp.sessions[q] == 0) continue;
      for (auto& t : res.targets[q]) {
        t /= static_cast<double>(qp.sessions[q]);
      }
    }
    return res;
  }

  res.tau = resolve_tau(cfg, log.total_clicks);
  TermsByLen by_len(res.tau);

  // Per-query page-derived weights, filled only for the families that need
  // them: avgsim for ipssim and raw mips weights for mips_ltr/drm.
  std::vector<std::vector<double>> avg(ds.queries.size());
  std::vector<std::vector<double>> mips_w(ds.queries.size());
  const bool want_avg = cfg.kind == EstimatorKind::kIpssim;
  const bool want_mips = cfg.kind == EstimatorKind::kMipsLtr ||
                         cfg.kind == EstimatorKind::kDrm;
  if (want_avg || want_mips) {
    for (std::size_t q = 0; q < ds.queries.size(); ++q) {
      if (qp.sessions[q] == 0) continue;
      const auto ranking = to_index_ranking(qp.page[q]);
      const QuerySimilarityCache cache =
          build_similarity_cache(ds.queries[q], ranking, cfg.similarity);
      if (want_avg) avg[q] = cache.avg;
      if (want_mips) {
        const std::vector<double> ones(ranking.size(), 1.0);
        mips_w[q].resize(ranking.size());
        for (std::size_t k = 0; k < ranking.size(); ++k) {
          mips_w[q][k] = mips_weight(cache.sim[ranking[k]], ones, k);
        }
        if (ranking.size() == 1) {
          res.flagged_zero_weight += qp.sessions[q];
        }
      }
    }
  }

  // dr/drm cross-fit: fold f sessions get predictions from the model
  // trained on the other fold's ips targets, so the regression never sees
  // the clicks it corrects.
  std::vector<TargetTable> pred;
  const bool doubly_robust =
      cfg.kind == EstimatorKind::kDr || cfg.kind == EstimatorKind::kDrm;
  if (doubly_robust) {
    std::vector<TargetTable> fold_acc(
        2, TargetTable(ds.queries.size()));
    std::vector<std::vector<std::size_t>> fold_sessions(
        2, std::vector<std::size_t>(ds.queries.size(), 0));
    for (auto& table : fold_acc) {
      for (std::size_t q = 0; q < ds.queries.size(); ++q) {
        table[q].assign(ds.queries[q].docs.size(), 0.0);
      }
    }
    for (std::size_t s = 0; s < log.sessions.size(); ++s) {
      const Session& sess = log.sessions[s];
      const std::size_t fold = s % 2;
      const auto& terms = by_len.of(sess.ranking.size());
      ++fold_sessions[fold][sess.query_index];
      for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
        fold_acc[fold][sess.query_index][static_cast<std::size_t>(
            sess.ranking[k])] +=
            (sess.clicks[k] - terms[k].eps_hat) / terms[k].rho_hat;
      }
    }
    pred.resize(2);
    for (std::size_t fold = 0; fold < 2; ++fold) {
      const std::size_t other = 1 - fold;
      TargetTable ips_targets = fold_acc[other];
      for (std::size_t q = 0; q < ds.queries.size(); ++q) {
        if (fold_sessions[other][q] == 0) continue;
        for (auto& t : ips_targets[q]) {
          t /= static_cast<double>(fold_sessions[other][q]);
        }
      }
      TrainConfig reg = cfg.regression;
      reg.objective = Objective::kSupervised;
      reg.seed = cfg.regression.seed + fold;
      reg.threads = cfg.threads;
      const Scorer model = train_ranker(ds, ips_targets, reg).scorer;
      pred[fold] = predict_relevance(model, ds);
    }
  }

  // Accumulate per-impression contributions; rps additionally tracks the
  // per-query effective session count.
  std::vector<double> effective(ds.queries.size(), 0.0);
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    const std::size_t q = sess.query_index;
    const auto& terms = by_len.of(sess.ranking.size());
    double ratio = 0.0;
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const WeightTerms& t = terms[k];
      const std::size_t d = static_cast<std::size_t>(sess.ranking[k]);
      const double corr = sess.clicks[k] - t.eps_hat;
      double contrib = 0.0;
      switch (cfg.kind) {
        case EstimatorKind::kIps:
          contrib = corr / t.rho_hat;
          break;
        case EstimatorKind::kIpssim:
          contrib = ((1.0 - cfg.alpha) / t.rho_hat +
                     cfg.alpha * avg[q][d]) *
                    corr;
          break;
        case EstimatorKind::kMipsLtr:
          contrib = mips_w[q][k] / t.rho_hat * corr;
          break;
        case EstimatorKind::kRps:
          contrib = corr / t.rho_hat;
          ratio += t.rho_raw / t.rho_hat;
          break;
        case EstimatorKind::kDr:
          contrib = pred[s % 2][q][d] +
                    (corr - t.rho_raw * pred[s % 2][q][d]) / t.rho_hat;
          break;
        case EstimatorKind::kDrm:
          contrib = pred[s % 2][q][d] +
                    mips_w[q][k] / t.rho_hat *
                        (corr - t.rho_raw * pred[s % 2][q][d]);
          break;
        case EstimatorKind::kNaive:
          break;  // handled above
      }
      res.targets[q][d] += contrib;
    }
    if (cfg.kind == EstimatorKind::kRps) {
      effective[q] += ratio / static_cast<double>(sess.ranking.size());
    }
  }
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    if (qp.sessions[q] == 0) continue;
    const double denom = cfg.kind == EstimatorKind::kRps
                             ? effective[q]
                             : static_cast<double>(qp.sessions[q]);
    for (auto& t : res.targets[q]) t /= denom;
  }
  return res;
}

void write_targets(const TargetTable& targets, const Dataset& ds,
                   std::ostream& out) {
  if (targets.size() != ds.queries.size()) {
    throw ValidationError("target table does not match the dataset");
  }
  out << "query_id,doc_id,target\n";
  std::string buf;
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    if (targets[q].size() != ds.queries[q].docs.size()) {
      throw ValidationError("target table does not match query '" +
                            ds.queries[q].query_id + "'");
    }
    for (std::size_t d = 0; d < targets[q].size(); ++d) {
      buf = ds.queries[q].query_id;
      buf += ',';
      buf += std::to_string(ds.queries[q].docs[d].doc_id);
      buf += ',';
      append_double(buf, targets[q][d]);
      buf += '\n';
      out << buf;
    }
  }
}

TargetTable read_targets(std::istream& in, const Dataset& ds) {
  std::unordered_map<std::string, std::size_t> query_index;
  std::vector<std::unordered_map<std::int64_t, std::size_t>> doc_index(
      ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    query_index[ds.queries[q].query_id] = q;
    for (std::size_t d = 0; d < ds.queries[q].docs.size(); ++d) {
      doc_index[q][ds.queries[q].docs[d].doc_id] = d;
    }
  }

  TargetTable targets(ds.queries.size());
  std::vector<std::vector<bool>> seen(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    targets[q].assign(ds.queries[q].docs.size(), 0.0);
    seen[q].assign(ds.queries[q].docs.size(), false);
  }

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "query_id,doc_id,target") {
    throw ParseError("bad targets header", 1);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos
                               ? std::string::npos
                               : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw ParseError("expected 3 fields", line_no);
    }
    const std::string qid = line.substr(0, c1);
    const std::string did = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string val = line.substr(c2 + 1);

    const auto qit = query_index.find(qid);
    if (qit == query_index.end()) {
      throw ValidationError("unknown query id '" + qid + "' at line " +
                            std::to_string(line_no));
    }
    std::int64_t doc_id = 0;
    auto [p1, e1] = std::from_chars(did.data(), did.data() + did.size(), doc_id);
    if (e1 != std::errc() || p1 != did.data() + did.size()) {
      throw ParseError("bad doc id '" + did + "'", line_no);
    }
    const auto dit = doc_index[qit->second].find(doc_id);
    if (dit == doc_index[qit->second].end()) {
      throw ValidationError("doc id " + did + " not in query '" + qid +
                            "' at line " + std::to_string(line_no));
    }
    double value = 0.0;
    auto [p2, e2] = std::from_chars(val.data(), val.data() + val.size(), value);
    if (e2 != std::errc() || p2 != val.data() + val.size()) {
      throw ParseError("bad target value '" + val + "'", line_no);
    }
    if (seen[qit->second][dit->second]) {
      throw ValidationError("duplicate target row at line " +
                            std::to_string(line_no));
    }
    seen[qit->second][dit->second] = true;
    targets[qit->second][dit->second] = value;
  }
  return targets;
}

void save_targets(const TargetTable& targets, const Dataset& ds,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_targets(targets, ds, out);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

TargetTable load_targets(const std::string& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_targets(in, ds);
}

}  // namespace ultr
