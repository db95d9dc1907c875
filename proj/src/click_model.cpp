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
#include "ultr/click_model.hpp"

#include <cmath>
#include <string>

#include "ultr/common.hpp"

namespace ultr {

namespace {

void check_position(std::size_t k) {
  if (k < 1) throw ValidationError("position must be >= 1");
}

}  // namespace

double observation_prob(std::size_t k) {
  check_position(k);
  const double base = 1.0 + (static_cast<double>(k) - 1.0) / 5.0;
  return 1.0 / (base * base);
}

ClickParams click_params(std::size_t k) {
  check_position(k);
  return {1.0, 0.1 + 0.6 / (1.0 + static_cast<double>(k) / 20.0)};
}

double click_prob(std::size_t k, double r) {
  if (r < 0.0 || r > 1.0) {
    throw ValidationError("normalized relevance " + std::to_string(r) +
                          " outside [0,1]");
  }
  const ClickParams p = click_params(k);
  return observation_prob(k) * (p.eps_plus * r + p.eps_minus * (1.0 - r));
}

PropensityTerms propensity_at(std::size_t k) {
  const double obs = observation_prob(k);
  const ClickParams p = click_params(k);
  return {obs * (p.eps_plus - p.eps_minus), obs * p.eps_minus};
}

double clip_propensity(double rho, double tau) {
  if (tau <= 0.0) throw ValidationError("clip threshold must be positive");
  return rho < tau ? tau : rho;
}

double default_tau(std::size_t n_clicks) {
  if (n_clicks == 0) throw ValidationError("click count must be positive");
  return 10.0 / std::sqrt(static_cast<double>(n_clicks));
}

}  // namespace ultr
