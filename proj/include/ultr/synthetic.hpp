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
#ifndef ULTR_SYNTHETIC_HPP_
#define ULTR_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ultr/letor.hpp"

namespace ultr {

// Synthetic ranking data with controllable cluster structure: the first
// few dimensions carry a grade signal shared across queries (so a scorer
// can generalize), the middle dimensions put same-grade documents of a
// query into a tight random cluster (so feature similarity carries
// relevance information), and the rest is noise.
struct SyntheticConfig {
  std::size_t n_queries = 50;
  std::size_t docs_per_query = 60;
  std::size_t feature_dim = 16;  // at least 8
  // Documents per grade 0..4; must sum to docs_per_query.
  std::vector<std::size_t> grade_counts = {30, 12, 8, 6, 4};
  double signal_noise = 0.08;    // jitter on the shared grade signal
  double cluster_spread = 0.04;  // jitter around per-(query, grade) centers
  std::uint64_t seed = 1;
  Split split_tag = Split::kTrain;
  std::string query_prefix = "q";  // query ids: <prefix><index>
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

// Writes train/validation/test LETOR files (train.txt, validation.txt,
// test.txt) into dir using seeds seed, seed+1, seed+2 and the given split
// sizes; returns the three paths.
std::vector<std::string> write_fixture(const std::string& dir,
                                       const SyntheticConfig& base,
                                       std::size_t validation_queries,
                                       std::size_t test_queries);

}  // namespace ultr

#endif  // ULTR_SYNTHETIC_HPP_
