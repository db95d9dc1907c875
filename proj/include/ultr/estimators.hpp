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
#ifndef ULTR_ESTIMATORS_HPP_
#define ULTR_ESTIMATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ultr/click_sim.hpp"
#include "ultr/letor.hpp"
#include "ultr/ranker.hpp"
#include "ultr/similarity.hpp"

namespace ultr {

enum class EstimatorKind { kNaive, kIps, kIpssim, kMipsLtr, kDr, kDrm, kRps };

EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);
// True for estimators whose weights involve document similarities.
bool uses_similarity(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kIpssim;
  double alpha = 0.0;            // similarity mixing weight, in [0,1]
  SimilarityConfig similarity;
  double tau = 0.0;              // propensity clip; 0 derives from n_clicks
  std::size_t n_clicks = 0;      // for tau derivation; 0 uses the log total
  TrainConfig regression;        // reward model for dr/drm (supervised)
  std::size_t omega_samples = 100;  // placement draws for stochastic policies
  std::uint64_t omega_seed = 1;
  std::size_t threads = 0;
};

void validate_estimator_config(const EstimatorConfig& cfg);
// The configured tau, or the 10/sqrt(clicks) default when tau is 0.
double resolve_tau(const EstimatorConfig& cfg, std::size_t log_clicks);

// Everything an estimator needs about one shown document: the target
// policy's placement probability, the clipped and raw logging propensities,
// the trust-bias correction and the average similarity to the top set.
struct WeightTerms {
  double omega_hat = 1.0;
  double rho_hat = 0.0;  // clipped
  double rho_raw = 0.0;
  double eps_hat = 0.0;
  double avgsim = 0.0;
};

// terms[s][k] mirrors log.sessions[s].ranking.
using TermsTable = std::vector<std::vector<WeightTerms>>;

// Per-position propensity terms for a page of the given length under the
// affine click model; omega_hat is 1 and avgsim 0.
std::vector<WeightTerms> derive_propensity_terms(std::size_t page_len,
                                                 double tau);

// Terms for every session of the log. avgsim comes from per-query caches
// over the logged page. With a target policy, omega_hat becomes the
// Plackett-Luce probability of the logged placement, estimated from
// cfg.omega_samples draws (exact 0/1 placement when omega_samples is 0).
TermsTable derive_terms(const ClickLog& log, const Dataset& ds,
                        const EstimatorConfig& cfg,
                        const Scorer* target_policy = nullptr);

// omega_hat * ((1 - alpha)/rho_hat + alpha * avgsim); rho_hat pre-clipped.
double ipssim_weight(const WeightTerms& t, double alpha);

// (1/s) sum over the other page slots of rank_prob * sim, where sim is the
// similarity of the weighted document to the document in that slot and
// s = page length - 1. A single-document page yields 0.
double mips_weight(const std::vector<double>& sim_row,
                   const std::vector<double>& rank_probs,
                   std::size_t self_pos);

// Raw mips weights for every session position, with rank probabilities 1
// (deterministic logging). flagged counts single-document pages.
std::vector<std::vector<double>> derive_mips_weights(
    const ClickLog& log, const Dataset& ds, const SimilarityConfig& sim,
    std::size_t* flagged = nullptr);

// (1/|H|) sum over sessions and positions of weight * (c - eps_hat).
double ipssim_estimate(const ClickLog& log,
                       const std::vector<std::vector<double>>& weights,
                       const std::vector<std::vector<double>>& eps_hats);
double ipssim_estimate(const ClickLog& log, const TermsTable& terms,
                       double alpha);
// Plain inverse-propensity weights omega_hat/rho_hat.
double ips_estimate(const ClickLog& log, const TermsTable& terms);
// Weights mips_w/rho_hat with the raw mips weights supplied by the caller.
double mips_estimate(const ClickLog& log,
                     const std::vector<std::vector<double>>& mips_weights,
                     const TermsTable& terms);
// Direct term omega_hat * prediction over shown documents plus the
// omega_hat/rho_hat weighted residual (c - eps_hat - rho_raw * prediction).
double dr_estimate(const ClickLog& log, const Dataset& ds,
                   const Scorer* regression, const TermsTable& terms);
// dr with the residual weight swapped for mips_w/rho_hat.
double drm_estimate(const ClickLog& log, const Dataset& ds,
                    const Scorer* regression,
                    const std::vector<std::vector<double>>& mips_weights,
                    const TermsTable& terms);
// Ratio-corrected ips: the session-mean ratio rho_raw/rho_hat rescales the
// denominator, undoing the systematic shrinkage that clipping introduces.
// With no clipping active it equals ips_estimate exactly.
double rps_estimate(const ClickLog& log, const TermsTable& terms);

struct TargetsResult {
  TargetTable targets;               // per (query, doc) debiased relevance
  std::vector<std::size_t> sessions; // |H_q| per query
  double tau = 0.0;                  // resolved clip threshold
  std::size_t flagged_zero_weight = 0;  // mips impressions with s = 0
};

// Debiased per-document training targets for the configured estimator.
// Documents never shown keep target 0.
TargetsResult compute_targets(const ClickLog& log, const Dataset& ds,
                              const EstimatorConfig& cfg);

void write_targets(const TargetTable& targets, const Dataset& ds,
                   std::ostream& out);
TargetTable read_targets(std::istream& in, const Dataset& ds);
void save_targets(const TargetTable& targets, const Dataset& ds,
                  const std::string& path);
TargetTable load_targets(const std::string& path, const Dataset& ds);

}  // namespace ultr

#endif  // ULTR_ESTIMATORS_HPP_
