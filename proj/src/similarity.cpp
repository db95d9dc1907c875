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
#include "ultr/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "ultr/common.hpp"
#include "ultr/kernels.hpp"

namespace ultr {

namespace {

void check_dims(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ValidationError("similarity arguments have different dimensions (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
}

}  // namespace

Measure parse_measure(const std::string& name) {
  if (name == "cosine") return Measure::kCosine;
  if (name == "euclidean") return Measure::kEuclidean;
  if (name == "manhattan") return Measure::kManhattan;
  throw ConfigError("unknown similarity measure: " + name);
}

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::kCosine: return "cosine";
    case Measure::kEuclidean: return "euclidean";
    case Measure::kManhattan: return "manhattan";
  }
  return "cosine";
}

double cosine_sim01(const std::vector<double>& x,
                    const std::vector<double>& y) {
  check_dims(x, y);
  const std::size_t n = x.size();
  const double nx = kernels::dot(x.data(), x.data(), n);
  const double ny = kernels::dot(y.data(), y.data(), n);
  if (nx == 0.0 || ny == 0.0) return 0.5;
  const double cos =
      kernels::dot(x.data(), y.data(), n) / (std::sqrt(nx) * std::sqrt(ny));
  // Rounding can push |cos| a hair past 1; clamp before the affine map.
  return (std::clamp(cos, -1.0, 1.0) + 1.0) / 2.0;
}

double dist_sim01(const std::vector<double>& x, const std::vector<double>& y,
                  double lambda, Measure metric) {
  check_dims(x, y);
  if (lambda <= 0.0) throw ValidationError("lambda must be positive");
  double d = 0.0;
  switch (metric) {
    case Measure::kEuclidean:
      d = std::sqrt(kernels::l2_distance_sq(x.data(), y.data(), x.size()));
      break;
    case Measure::kManhattan:
      d = kernels::l1_distance(x.data(), y.data(), x.size());
      break;
    case Measure::kCosine:
      throw ValidationError("dist_sim01 requires a distance metric");
  }
  return std::exp(-lambda * d);
}

double similarity(const std::vector<double>& x, const std::vector<double>& y,
                  const SimilarityConfig& cfg) {
  if (cfg.measure == Measure::kCosine) return cosine_sim01(x, y);
  return dist_sim01(x, y, cfg.lambda, cfg.measure);
}

std::vector<std::size_t> top_set(const std::vector<std::size_t>& ranking,
                                 std::size_t size) {
  if (ranking.empty()) throw ValidationError("top_set of an empty ranking");
  if (size < 1) throw ValidationError("top_set size must be >= 1");
  const std::size_t n = std::min(size, ranking.size());
  return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(n)};
}

double avgsim(const QueryGroup& q, std::size_t doc_index,
              const std::vector<std::size_t>& top_indices,
              const SimilarityConfig& cfg) {
  if (top_indices.empty()) throw ValidationError("avgsim over an empty T");
  double sum = 0.0;
  std::size_t excluded = 0;
  for (std::size_t m : top_indices) {
    if (m == doc_index) {
      ++excluded;
      continue;
    }
    sum += similarity(q.docs[doc_index].features, q.docs[m].features, cfg);
  }
  const std::size_t divisor =
      cfg.strict_exclusion ? top_indices.size() - excluded : top_indices.size();
  if (divisor == 0) return 0.0;
  return sum / static_cast<double>(divisor);
}

QuerySimilarityCache build_similarity_cache(
    const QueryGroup& q, const std::vector<std::size_t>& logging_ranking,
    const SimilarityConfig& cfg) {
  QuerySimilarityCache cache;
  cache.ranked = logging_ranking;
  const std::vector<std::size_t> top = top_set(logging_ranking,
                                               cfg.top_set_size);
  cache.sim.resize(q.docs.size());
  cache.avg.resize(q.docs.size());
  for (std::size_t d = 0; d < q.docs.size(); ++d) {
    cache.sim[d].resize(logging_ranking.size());
    for (std::size_t j = 0; j < logging_ranking.size(); ++j) {
      cache.sim[d][j] = similarity(q.docs[d].features,
                                   q.docs[logging_ranking[j]].features, cfg);
    }
    cache.avg[d] = avgsim(q, d, top, cfg);
  }
  return cache;
}

}  // namespace ultr
