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
#ifndef ULTR_SIMILARITY_HPP_
#define ULTR_SIMILARITY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ultr/letor.hpp"

// Feature-space document similarities mapped into [0,1] and their average
// against the top-|T| documents of the historical ranking. avgsim follows
// the literal formula: the sum skips i itself but the divisor stays |T|;
// strict_exclusion switches the divisor to |T \ {i}|.

namespace ultr {

enum class Measure { kCosine, kEuclidean, kManhattan };

Measure parse_measure(const std::string& name);
std::string measure_name(Measure m);

struct SimilarityConfig {
  Measure measure = Measure::kCosine;
  double lambda = 1.0;            // decay rate for distance measures
  std::size_t top_set_size = 5;   // |T|
  bool strict_exclusion = false;  // divide by |T \ {i}| instead of |T|
};

/// (cos(x,y) + 1) / 2; a zero vector contributes cos = 0, so 0.5.
double cosine_sim01(const std::vector<double>& x,
                    const std::vector<double>& y);

/// exp(-lambda * d(x,y)) for euclidean or manhattan d.
double dist_sim01(const std::vector<double>& x, const std::vector<double>& y,
                  double lambda, Measure metric);

/// Dispatches on cfg.measure.
double similarity(const std::vector<double>& x, const std::vector<double>& y,
                  const SimilarityConfig& cfg);

/// First min(size, |ranking|) entries of the logging ranking.
std::vector<std::size_t> top_set(const std::vector<std::size_t>& ranking,
                                 std::size_t size);

/// Eq.-style average similarity of doc_index against T (indices into
/// q.docs). The sum always excludes doc_index itself.
double avgsim(const QueryGroup& q, std::size_t doc_index,
              const std::vector<std::size_t>& top_indices,
              const SimilarityConfig& cfg);

// Per-query cache: the logging ranking prefix is fixed, so similarities
// against it and the avgsim values are computed once and reused across all
// sessions, estimators and training epochs.
struct QuerySimilarityCache {
  std::vector<std::size_t> ranked;       // logging ranking doc indices
  std::vector<std::vector<double>> sim;  // sim[d][j] vs ranked[j]
  std::vector<double> avg;               // avgsim per doc index
};

QuerySimilarityCache build_similarity_cache(
    const QueryGroup& q, const std::vector<std::size_t>& logging_ranking,
    const SimilarityConfig& cfg);

}  // namespace ultr

#endif  // ULTR_SIMILARITY_HPP_
