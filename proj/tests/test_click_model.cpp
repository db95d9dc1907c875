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

#include "ultr/click_model.hpp"
#include "ultr/common.hpp"
#include "ultr/rng.hpp"

using namespace ultr;

TEST_CASE("observation probability follows the inverse-square schedule") {
  CHECK(observation_prob(1) == 1.0);
  CHECK(observation_prob(6) == 0.25);
  CHECK(observation_prob(11) == doctest::Approx(1.0 / 9.0).epsilon(1e-4));
  // Monotone non-increasing over a long prefix.
  for (std::size_t k = 1; k < 200; ++k) {
    CHECK(observation_prob(k + 1) <= observation_prob(k));
  }
  CHECK_THROWS_AS(observation_prob(0), ValidationError);
}

TEST_CASE("trust-bias click parameters") {
  CHECK(click_params(20).eps_plus == 1.0);
  CHECK(click_params(20).eps_minus == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(click_params(1).eps_minus ==
        doctest::Approx(0.67142857142857).epsilon(1e-6));
  // eps_minus decays towards its 0.1 asymptote and stays below eps_plus.
  double prev = 1.0;
  for (std::size_t k = 1; k <= 10000; k *= 10) {
    const ClickParams p = click_params(k);
    CHECK(p.eps_minus > 0.1);
    CHECK(p.eps_minus < prev);
    CHECK(p.eps_minus < p.eps_plus);
    prev = p.eps_minus;
  }
  CHECK(click_params(1000000).eps_minus == doctest::Approx(0.1).epsilon(1e-4));
  CHECK_THROWS_AS(click_params(0), ValidationError);
}

TEST_CASE("click probability composes the affine model") {
  // Fully relevant at the top position always clicks.
  CHECK(click_prob(1, 1.0) == 1.0);
  // Non-relevant at the top clicks at the trust-bias rate.
  CHECK(click_prob(1, 0.0) == doctest::Approx(0.67142857142857).epsilon(1e-6));
  const double em6 = 0.1 + 0.6 / 1.3;
  CHECK(click_prob(6, 0.5) ==
        doctest::Approx(0.25 * (0.5 + 0.5 * em6)).epsilon(1e-12));
  CHECK_THROWS_AS(click_prob(1, -0.1), ValidationError);
  CHECK_THROWS_AS(click_prob(1, 1.1), ValidationError);
}

TEST_CASE("correction terms make the click model identity hold") {
  const PropensityTerms t1 = propensity_at(1);
  CHECK(t1.eps_hat == doctest::Approx(0.67142857142857).epsilon(1e-6));
  CHECK(t1.rho_hat == doctest::Approx(0.32857142857143).epsilon(1e-6));

  // E[c] = eps_hat + rho_hat * R for any (R, k), so (E[c] - eps_hat) /
  // rho_hat recovers R exactly.
  for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{10},
                        std::size_t{37}}) {
    const PropensityTerms t = propensity_at(k);
    for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double ec = click_prob(k, r);
      CHECK((ec - t.eps_hat) / t.rho_hat == doctest::Approx(r).epsilon(1e-12));
    }
  }

  // Both terms vanish as the observation probability does.
  const PropensityTerms deep = propensity_at(100000);
  CHECK(deep.rho_hat < 1e-8);
  CHECK(deep.eps_hat < 1e-8);
}

TEST_CASE("propensity clipping") {
  CHECK(default_tau(10000) == 0.1);
  CHECK(clip_propensity(0.05, 0.1) == 0.1);
  CHECK(clip_propensity(0.5, 0.1) == 0.5);
  CHECK_THROWS_AS(clip_propensity(0.5, 0.0), ValidationError);
  CHECK_THROWS_AS(default_tau(0), ValidationError);
  // Clipping caps the weight: 1/clip <= 1/rho and 1/clip <= 1/tau.
  ultr::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double rho = rng.uniform(1e-6, 1.0);
    const double tau = rng.uniform(1e-6, 1.0);
    const double c = clip_propensity(rho, tau);
    CHECK(1.0 / c <= 1.0 / rho + 1e-15);
    CHECK(1.0 / c <= 1.0 / tau + 1e-15);
  }
}

TEST_CASE("monte-carlo click frequency matches the closed form") {
  // 3-sigma binomial band at 20k draws per cell; the acceptance suite runs
  // the full 1e5-draw grid.
  const std::size_t n = 20000;
  for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{10}}) {
    for (double r : {0.0, 0.5, 1.0}) {
      const double p = click_prob(k, r);
      Rng rng(41 * k + static_cast<std::uint64_t>(r * 4));
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) hits += rng.bernoulli(p);
      const double freq = static_cast<double>(hits) / n;
      const double sigma = std::sqrt(p * (1.0 - p) / n);
      CHECK(std::fabs(freq - p) <= 3.0 * sigma + 1e-12);
    }
  }
}
