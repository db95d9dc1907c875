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
#ifndef ULTR_CLICK_MODEL_HPP_
#define ULTR_CLICK_MODEL_HPP_

#include <cstddef>

// Affine position/trust-bias click model. A user clicks the document at
// 1-based position k with probability
//
//   P(click) = obs(k) * (eps_plus(k) * R + eps_minus(k) * (1 - R))
//
// where R is the normalized relevance grade, obs(k) the examination
// probability, eps_plus the click rate on perceived-relevant documents and
// eps_minus the residual click rate on non-relevant ones (trust bias).

namespace ultr {

/// P(document at position k is examined) = (1 + (k-1)/5)^-2.
double observation_prob(std::size_t k);

struct ClickParams {
  double eps_plus;
  double eps_minus;
};

/// eps_plus(k) = 1, eps_minus(k) = 0.1 + 0.6 / (1 + k/20).
ClickParams click_params(std::size_t k);

/// Click probability for normalized relevance r in [0,1] at position k.
double click_prob(std::size_t k, double r);

struct PropensityTerms {
  double rho_hat;
  double eps_hat;
};

/// Affine correction terms at position k:
///   eps_hat = obs(k) * eps_minus(k)
///   rho_hat = obs(k) * (eps_plus(k) - eps_minus(k))
/// chosen so that E[(c - eps_hat) / rho_hat] = R under click_prob.
PropensityTerms propensity_at(std::size_t k);

/// max(rho, tau), the variance-capping lower bound on propensities.
double clip_propensity(double rho, double tau);

/// Default clipping threshold 10 / sqrt(n_clicks).
double default_tau(std::size_t n_clicks);

}  // namespace ultr

#endif  // ULTR_CLICK_MODEL_HPP_
