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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ultr/click_model.hpp"
#include "ultr/common.hpp"
#include "ultr/estimators.hpp"
#include "ultr/rng.hpp"

using namespace ultr;

namespace {

Dataset toy_dataset(std::size_t n_queries, const std::vector<int>& grades,
                    std::uint64_t seed = 7) {
  Dataset ds;
  ds.feature_dim = 3;
  Rng rng(seed);
  for (std::size_t q = 0; q < n_queries; ++q) {
    QueryGroup g;
    g.query_id = "q" + std::to_string(q);
    for (std::size_t d = 0; d < grades.size(); ++d) {
      g.docs.push_back({static_cast<std::int64_t>(d),
                        {grades[d] / 4.0, rng.next_double(), 1.0},
                        grades[d]});
    }
    ds.queries.push_back(std::move(g));
  }
  return ds;
}

Scorer zero_scorer(std::size_t feature_dim) {
  Scorer s = make_scorer(feature_dim, 1);
  for (auto& w : s.weights) {
    for (auto& v : w) v = 0.0;
  }
  return s;
}

ClickLog make_log(const Dataset& ds, std::size_t target_clicks,
                  std::size_t top_n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.target_clicks = target_clicks;
  cfg.top_n = top_n;
  cfg.seed = seed;
  return simulate_clicks(ds, zero_scorer(ds.feature_dim), cfg);
}

// Literal transcription of the double sum, kept independent of the library
// accumulation path.
double oracle_weighted_sum(const ClickLog& log,
                           const std::vector<std::vector<double>>& weights,
                           const std::vector<std::vector<double>>& eps) {
  double total = 0.0;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    for (std::size_t k = 0; k < log.sessions[s].ranking.size(); ++k) {
      total += weights[s][k] * (log.sessions[s].clicks[k] - eps[s][k]);
    }
  }
  return total / static_cast<double>(log.sessions.size());
}

}  // namespace

TEST_CASE("estimator names round-trip and flag similarity use") {
  const std::vector<std::string> names = {"naive", "ips",  "ipssim", "mips_ltr",
                                          "dr",    "drm", "rps"};
  for (const auto& n : names) {
    CHECK(estimator_name(parse_estimator(n)) == n);
  }
  CHECK_THROWS_AS(parse_estimator("snips"), ConfigError);
  CHECK(uses_similarity(EstimatorKind::kIpssim));
  CHECK(uses_similarity(EstimatorKind::kMipsLtr));
  CHECK(uses_similarity(EstimatorKind::kDrm));
  CHECK_FALSE(uses_similarity(EstimatorKind::kIps));
  CHECK_FALSE(uses_similarity(EstimatorKind::kNaive));
  CHECK_FALSE(uses_similarity(EstimatorKind::kDr));
  CHECK_FALSE(uses_similarity(EstimatorKind::kRps));
}

TEST_CASE("estimator config is validated and tau resolves") {
  EstimatorConfig cfg;
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(validate_estimator_config(cfg), ConfigError);
  cfg.alpha = 0.5;
  cfg.tau = -0.1;
  CHECK_THROWS_AS(validate_estimator_config(cfg), ConfigError);
  cfg.tau = 0.25;
  CHECK(resolve_tau(cfg, 123) == 0.25);
  cfg.tau = 0.0;
  cfg.n_clicks = 10000;
  CHECK(resolve_tau(cfg, 123) == doctest::Approx(0.1).epsilon(1e-15));
  cfg.n_clicks = 0;
  CHECK(resolve_tau(cfg, 400) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("propensity terms follow the affine click model") {
  const auto terms = derive_propensity_terms(10, 1e-9);
  CHECK(terms[0].eps_hat == doctest::Approx(0.6714285714285714).epsilon(1e-15));
  CHECK(terms[0].rho_raw == doctest::Approx(0.3285714285714286).epsilon(1e-15));
  CHECK(terms[0].rho_hat == terms[0].rho_raw);  // clip inactive
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const PropensityTerms p = propensity_at(k + 1);
    CHECK(terms[k].rho_raw == p.rho_hat);
    CHECK(terms[k].eps_hat == p.eps_hat);
    CHECK(terms[k].eps_hat >= 0.0);
    CHECK(terms[k].eps_hat <= 1.0);
    CHECK(terms[k].omega_hat == 1.0);
  }
  const auto clipped = derive_propensity_terms(10, 0.2);
  for (const auto& t : clipped) {
    CHECK(t.rho_hat >= 0.2);
    CHECK(t.rho_hat == std::max(t.rho_raw, 0.2));
  }
}

TEST_CASE("ipssim weight arithmetic and interpolation") {
  WeightTerms t;
  t.omega_hat = 1.0;
  t.rho_hat = 0.5;
  t.avgsim = 0.0;
  CHECK(ipssim_weight(t, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  t.avgsim = 0.5;
  CHECK(ipssim_weight(t, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  t.omega_hat = 0.8;
  t.rho_hat = 0.4;
  t.avgsim = 0.6;
  CHECK(ipssim_weight(t, 0.5) == doctest::Approx(1.24).epsilon(1e-15));

  // Affine in alpha, and strictly increasing in avgsim for alpha > 0.
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    WeightTerms w;
    w.omega_hat = rng.next_double() + 0.1;
    w.rho_hat = rng.next_double() + 0.05;
    w.avgsim = rng.next_double();
    const double alpha = rng.next_double();
    const double interp =
        (1 - alpha) * ipssim_weight(w, 0.0) + alpha * w.omega_hat * w.avgsim;
    CHECK(std::fabs(ipssim_weight(w, alpha) - interp) < 1e-12);

    WeightTerms higher = w;
    higher.avgsim = w.avgsim + 0.1;
    CHECK(ipssim_weight(higher, 0.3) > ipssim_weight(w, 0.3));
  }
}

TEST_CASE("mips weight matches hand evaluations") {
  CHECK(mips_weight({0.5, 1.0}, {1.0, 0.3}, 0) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(mips_weight({0.0, 1.0, 0.0}, {0.5, 0.5, 0.5}, 2) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mips_weight({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 1) == 0.0);
  CHECK(mips_weight({1.0}, {1.0}, 0) == 0.0);  // single-doc page
  CHECK_THROWS_AS(mips_weight({1.0, 0.5}, {1.0}, 0), ValidationError);
  CHECK_THROWS_AS(mips_weight({1.0, 0.5}, {1.0, 1.0}, 2), ValidationError);
}

TEST_CASE("ipssim estimate hand cases") {
  ClickLog log;
  log.top_n = 1;
  Session s;
  s.query_index = 0;
  s.ranking = {0};
  s.clicks = {1};
  log.sessions.push_back(s);

  CHECK(ipssim_estimate(log, {{1.0}}, {{0.0}}) == 1.0);
  s.clicks = {0};
  log.sessions[0] = s;
  CHECK(ipssim_estimate(log, {{1.0}}, {{0.0}}) == 0.0);

  s.clicks = {1};
  log.sessions[0] = s;
  s.clicks = {0};
  log.sessions.push_back(s);
  CHECK(ipssim_estimate(log, {{2.0}, {2.0}}, {{0.5}, {0.5}}) ==
        doctest::Approx(0.0).epsilon(1e-15));

  ClickLog empty;
  CHECK_THROWS_AS(ipssim_estimate(empty, {}, {}), ValidationError);
  CHECK_THROWS_AS(ipssim_estimate(log, {{1.0}}, {{0.0}, {0.0}}),
                  ValidationError);
}

TEST_CASE("estimates match a literal transcription on random instances") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    ClickLog log;
    const std::size_t n_sessions = 1 + rng.uniform_index(4);
    for (std::size_t s = 0; s < n_sessions; ++s) {
      Session sess;
      sess.query_index = 0;
      for (std::size_t k = 0; k < 5; ++k) {
        sess.ranking.push_back(static_cast<std::int32_t>(k));
        sess.clicks.push_back(rng.bernoulli(0.5) ? 1 : 0);
      }
      log.sessions.push_back(std::move(sess));
    }
    std::vector<std::vector<double>> weights(n_sessions), eps(n_sessions);
    for (std::size_t s = 0; s < n_sessions; ++s) {
      for (std::size_t k = 0; k < 5; ++k) {
        weights[s].push_back(rng.uniform(-2.0, 4.0));
        eps[s].push_back(rng.next_double());
      }
    }
    CHECK(std::fabs(ipssim_estimate(log, weights, eps) -
                    oracle_weighted_sum(log, weights, eps)) < 1e-10);
  }
}

TEST_CASE("alpha zero reduces ipssim to ips bit for bit") {
  const Dataset ds = toy_dataset(3, {4, 2, 0, 1});
  const ClickLog log = make_log(ds, 400, 4, 3);
  EstimatorConfig cfg;
  const TermsTable terms = derive_terms(log, ds, cfg);
  CHECK(ipssim_estimate(log, terms, 0.0) == ips_estimate(log, terms));
}

TEST_CASE("mips estimate hand case and identity weights") {
  ClickLog log;
  Session s;
  s.query_index = 0;
  s.ranking = {0};
  s.clicks = {1};
  log.sessions.push_back(s);
  TermsTable terms(1, std::vector<WeightTerms>(1));
  terms[0][0].rho_hat = 0.5;
  terms[0][0].rho_raw = 0.5;
  terms[0][0].eps_hat = 0.1;
  CHECK(mips_estimate(log, {{0.3}}, terms) ==
        doctest::Approx(0.54).epsilon(1e-12));

  // mips weights equal to omega reduce the composite to the ips weight.
  const Dataset ds = toy_dataset(2, {3, 1, 0});
  const ClickLog sim_log = make_log(ds, 300, 3, 9);
  EstimatorConfig cfg;
  const TermsTable t2 = derive_terms(sim_log, ds, cfg);
  std::vector<std::vector<double>> ones(t2.size());
  for (std::size_t i = 0; i < t2.size(); ++i) {
    ones[i].assign(t2[i].size(), 1.0);
  }
  CHECK(mips_estimate(sim_log, ones, t2) == ips_estimate(sim_log, t2));
}

TEST_CASE("dr reduces to ips under zero predictions") {
  const Dataset ds = toy_dataset(3, {4, 2, 1, 0});
  const ClickLog log = make_log(ds, 500, 4, 21);
  EstimatorConfig cfg;
  const TermsTable terms = derive_terms(log, ds, cfg);
  const Scorer zero = zero_scorer(ds.feature_dim);
  CHECK(std::fabs(dr_estimate(log, ds, &zero, terms) -
                  ips_estimate(log, terms)) < 1e-12);
  CHECK_THROWS_AS(dr_estimate(log, ds, nullptr, terms), ConfigError);

  // drm: zero predictions reduce to mips; ips-matching weights reduce to dr.
  const auto mips_w = derive_mips_weights(log, ds, cfg.similarity);
  CHECK(std::fabs(drm_estimate(log, ds, &zero, mips_w, terms) -
                  mips_estimate(log, mips_w, terms)) < 1e-12);
  const Scorer reg = make_scorer(ds.feature_dim, 4);
  std::vector<std::vector<double>> omega(terms.size());
  for (std::size_t s = 0; s < terms.size(); ++s) {
    omega[s].assign(terms[s].size(), 1.0);
  }
  CHECK(std::fabs(drm_estimate(log, ds, &reg, omega, terms) -
                  dr_estimate(log, ds, &reg, terms)) < 1e-12);
}

TEST_CASE("dr estimate matches a compositional oracle") {
  const Dataset ds = toy_dataset(2, {4, 0, 2});
  const ClickLog log = make_log(ds, 200, 3, 27);
  EstimatorConfig cfg;
  const TermsTable terms = derive_terms(log, ds, cfg);
  const Scorer reg = make_scorer(ds.feature_dim, 8);

  double oracle = 0.0;
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const auto& q = ds.queries[sess.query_index];
      double r_hat = score(reg, q.docs[sess.ranking[k]].features);
      r_hat = std::min(1.0, std::max(0.0, r_hat));
      const WeightTerms& t = terms[s][k];
      oracle += r_hat + (sess.clicks[k] - t.eps_hat - t.rho_raw * r_hat) /
                            t.rho_hat;
    }
  }
  oracle /= static_cast<double>(log.sessions.size());
  CHECK(std::fabs(dr_estimate(log, ds, &reg, terms) - oracle) < 1e-10);
}

TEST_CASE("rps equals ips when clipping never binds and rescales otherwise") {
  const Dataset ds = toy_dataset(2, {4, 2, 0});
  const ClickLog log = make_log(ds, 400, 3, 33);
  EstimatorConfig cfg;
  cfg.tau = 1e-9;  // below every propensity
  const TermsTable loose = derive_terms(log, ds, cfg);
  CHECK(rps_estimate(log, loose) == ips_estimate(log, loose));

  cfg.tau = 0.4;  // clips positions 2 and 3
  const TermsTable tight = derive_terms(log, ds, cfg);
  double h_eff = 0.0;
  for (const auto& sess : tight) {
    double ratio = 0.0;
    for (const auto& t : sess) ratio += t.rho_raw / t.rho_hat;
    h_eff += ratio / static_cast<double>(sess.size());
  }
  const double expected = ips_estimate(log, tight) *
                          static_cast<double>(log.sessions.size()) / h_eff;
  CHECK(rps_estimate(log, tight) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("naive targets are per-query click rates") {
  const Dataset ds = toy_dataset(2, {4, 0, 1});
  ClickLog log;
  for (int i = 0; i < 4; ++i) {
    Session s;
    s.query_index = 0;
    s.ranking = {0, 1};
    s.clicks = {static_cast<std::uint8_t>(i < 3 ? 1 : 0), 0};
    log.sessions.push_back(s);
  }
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::kNaive;
  const TargetsResult res = compute_targets(log, ds, cfg);
  CHECK(res.targets[0][0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(res.targets[0][1] == 0.0);
  CHECK(res.targets[0][2] == 0.0);  // never shown
  CHECK(res.targets[1] == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(res.sessions[0] == 4);
  CHECK(res.sessions[1] == 0);
}

TEST_CASE("per-document targets are consistent with the scalar estimates") {
  const Dataset ds = toy_dataset(3, {4, 3, 2, 1, 0});
  const ClickLog log = make_log(ds, 600, 5, 39);
  EstimatorConfig cfg;
  cfg.alpha = 0.4;
  const TermsTable terms = derive_terms(log, ds, cfg);
  const auto counts = sessions_per_query(log, ds.queries.size());

  auto weighted_target_sum = [&](const TargetTable& targets) {
    double total = 0.0;
    for (std::size_t q = 0; q < targets.size(); ++q) {
      double per_query = 0.0;
      for (const double t : targets[q]) per_query += t;
      total += per_query * static_cast<double>(counts[q]);
    }
    return total / static_cast<double>(log.sessions.size());
  };

  cfg.kind = EstimatorKind::kIps;
  CHECK(std::fabs(weighted_target_sum(compute_targets(log, ds, cfg).targets) -
                  ips_estimate(log, terms)) < 1e-12);

  cfg.kind = EstimatorKind::kIpssim;
  CHECK(std::fabs(weighted_target_sum(compute_targets(log, ds, cfg).targets) -
                  ipssim_estimate(log, terms, cfg.alpha)) < 1e-12);

  cfg.kind = EstimatorKind::kMipsLtr;
  const auto mips_w = derive_mips_weights(log, ds, cfg.similarity);
  CHECK(std::fabs(weighted_target_sum(compute_targets(log, ds, cfg).targets) -
                  mips_estimate(log, mips_w, terms)) < 1e-12);

  // rps normalizes per query, so compare on a single-query log where the
  // per-query and global effective counts coincide.
  const Dataset one = toy_dataset(1, {4, 2, 0});
  const ClickLog one_log = make_log(one, 300, 3, 41);
  EstimatorConfig rcfg;
  rcfg.kind = EstimatorKind::kRps;
  rcfg.tau = 0.4;
  const TargetsResult rres = compute_targets(one_log, one, rcfg);
  double sum = 0.0;
  for (const double t : rres.targets[0]) sum += t;
  CHECK(std::fabs(sum - rps_estimate(one_log, derive_terms(one_log, one, rcfg))) <
        1e-12);
}

TEST_CASE("doubly robust targets match the cross-fit composition") {
  const Dataset ds = toy_dataset(2, {4, 1, 0});
  const ClickLog log = make_log(ds, 250, 3, 45);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::kDr;
  cfg.regression.epochs = 0;  // fold models stay at their seeded init
  cfg.regression.seed = 100;
  const TargetsResult res = compute_targets(log, ds, cfg);

  // Rebuild the same composition by hand: fold f predicts with the scorer
  // initialized from seed 100 + f, and sessions alternate folds by index.
  const Scorer fold_model[2] = {make_scorer(ds.feature_dim, 100),
                                make_scorer(ds.feature_dim, 101)};
  const double tau = resolve_tau(cfg, log.total_clicks);
  TargetTable oracle(ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    oracle[q].assign(ds.queries[q].docs.size(), 0.0);
  }
  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const Session& sess = log.sessions[s];
    const auto terms = derive_propensity_terms(sess.ranking.size(), tau);
    for (std::size_t k = 0; k < sess.ranking.size(); ++k) {
      const auto& doc = ds.queries[sess.query_index].docs[sess.ranking[k]];
      double r_hat = score(fold_model[s % 2], doc.features);
      r_hat = std::min(1.0, std::max(0.0, r_hat));
      oracle[sess.query_index][static_cast<std::size_t>(sess.ranking[k])] +=
          r_hat + (sess.clicks[k] - terms[k].eps_hat -
                   terms[k].rho_raw * r_hat) /
                      terms[k].rho_hat;
    }
  }
  const auto counts = sessions_per_query(log, ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    for (auto& t : oracle[q]) t /= static_cast<double>(counts[q]);
  }
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    for (std::size_t d = 0; d < oracle[q].size(); ++d) {
      CHECK(std::fabs(res.targets[q][d] - oracle[q][d]) < 1e-12);
    }
  }
}

TEST_CASE("ips targets converge to the true relevance") {
  const Dataset ds = toy_dataset(1, {4, 2, 0});
  const ClickLog log = make_log(ds, 50000, 3, 51);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::kIps;
  cfg.tau = 1e-9;  // no clipping, keep the estimate exactly unbiased
  const TargetsResult res = compute_targets(log, ds, cfg);
  const std::vector<double> truth = {1.0, 0.5, 0.0};
  for (std::size_t d = 0; d < 3; ++d) {
    CHECK(std::fabs(res.targets[0][d] - truth[d]) < 0.05);
  }
}

TEST_CASE("mips flags single-document pages") {
  const Dataset ds = toy_dataset(1, {4});
  const ClickLog log = make_log(ds, 20, 1, 57);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::kMipsLtr;
  const TargetsResult res = compute_targets(log, ds, cfg);
  CHECK(res.flagged_zero_weight == log.sessions.size());
  CHECK(res.targets[0][0] == 0.0);  // weight defined as 0

  std::size_t flagged = 0;
  derive_mips_weights(log, ds, cfg.similarity, &flagged);
  CHECK(flagged == log.sessions.size());
}

TEST_CASE("mixed-page logs are rejected") {
  const Dataset ds = toy_dataset(1, {4, 0});
  ClickLog log;
  Session a;
  a.query_index = 0;
  a.ranking = {0, 1};
  a.clicks = {0, 0};
  Session b = a;
  b.ranking = {1, 0};
  log.sessions.push_back(a);
  log.sessions.push_back(b);
  EstimatorConfig cfg;
  CHECK_THROWS_AS(compute_targets(log, ds, cfg), ValidationError);
}

TEST_CASE("stochastic placement probabilities are sane") {
  const Dataset ds = toy_dataset(2, {4, 2, 0});
  const ClickLog log = make_log(ds, 100, 3, 63);
  EstimatorConfig cfg;
  cfg.omega_samples = 0;  // deterministic target = logging policy
  const Scorer policy = zero_scorer(ds.feature_dim);
  const TermsTable exact = derive_terms(log, ds, cfg, &policy);
  for (const auto& sess : exact) {
    for (const auto& t : sess) CHECK(t.omega_hat == 1.0);
  }

  cfg.omega_samples = 200;
  const TermsTable sampled = derive_terms(log, ds, cfg, &policy);
  const TermsTable again = derive_terms(log, ds, cfg, &policy);
  for (std::size_t s = 0; s < sampled.size(); ++s) {
    for (std::size_t k = 0; k < sampled[s].size(); ++k) {
      CHECK(sampled[s][k].omega_hat >= 0.0);
      CHECK(sampled[s][k].omega_hat <= 1.0);
      CHECK(sampled[s][k].omega_hat == again[s][k].omega_hat);
    }
  }
}

TEST_CASE("targets csv round-trips exactly") {
  const Dataset ds = toy_dataset(2, {4, 1, 0});
  const ClickLog log = make_log(ds, 150, 3, 69);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::kIpssim;
  cfg.alpha = 0.3;
  const TargetTable targets = compute_targets(log, ds, cfg).targets;

  std::stringstream io;
  write_targets(targets, ds, io);
  const TargetTable back = read_targets(io, ds);
  REQUIRE(back.size() == targets.size());
  for (std::size_t q = 0; q < targets.size(); ++q) {
    CHECK(back[q] == targets[q]);  // bitwise via shortest round-trip form
  }

  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return read_targets(in, ds);
  };
  CHECK_THROWS_AS(parse("nope\n"), ParseError);
  CHECK_THROWS_AS(parse("query_id,doc_id,target\nqX,0,1\n"), ValidationError);
  CHECK_THROWS_AS(parse("query_id,doc_id,target\nq0,9,1\n"), ValidationError);
  CHECK_THROWS_AS(parse("query_id,doc_id,target\nq0,0,x\n"), ParseError);
  CHECK_THROWS_AS(parse("query_id,doc_id,target\nq0,0,1\nq0,0,2\n"),
                  ValidationError);
}
