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
#include "ultr/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "ultr/common.hpp"
#include "ultr/rng.hpp"

namespace ultr {

namespace {

constexpr std::size_t kSignalDims = 4;
constexpr std::size_t kClusterDims = 4;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void validate(const SyntheticConfig& cfg) {
  if (cfg.n_queries == 0) throw ConfigError("n_queries must be positive");
  if (cfg.feature_dim < kSignalDims + kClusterDims) {
    throw ConfigError("feature_dim must be at least 8");
  }
  if (cfg.grade_counts.size() != 5) {
    throw ConfigError("grade_counts needs one entry per grade 0..4");
  }
  const std::size_t total = std::accumulate(cfg.grade_counts.begin(),
                                            cfg.grade_counts.end(),
                                            std::size_t{0});
  if (total != cfg.docs_per_query || total == 0) {
    throw ConfigError("grade_counts must sum to docs_per_query");
  }
  if (cfg.signal_noise < 0.0 || cfg.cluster_spread < 0.0) {
    throw ConfigError("noise levels must be non-negative");
  }
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  validate(cfg);
  Dataset ds;
  ds.feature_dim = cfg.feature_dim;
  ds.split_tag = cfg.split_tag;
  // Fixed signal weights: higher grades push the leading dims up, each dim
  // a little less strongly than the previous one.
  const double signal_weight[kSignalDims] = {1.0, 0.8, 0.6, 0.4};

  for (std::size_t q = 0; q < cfg.n_queries; ++q) {
    // Substream per query; adding queries never reshuffles earlier ones.
    Rng rng(cfg.seed, q + 1);
    QueryGroup group;
    group.query_id = cfg.query_prefix + std::to_string(q);

    // One cluster center per grade in the cluster dims.
    double centers[5][kClusterDims];
    for (int g = 0; g < 5; ++g) {
      for (std::size_t j = 0; j < kClusterDims; ++j) {
        centers[g][j] = rng.next_double();
      }
    }

    std::vector<int> grades;
    grades.reserve(cfg.docs_per_query);
    for (int g = 0; g < 5; ++g) {
      grades.insert(grades.end(), cfg.grade_counts[static_cast<std::size_t>(g)],
                    g);
    }
    // Shuffle so document order (the scoring tie-break) carries no signal.
    for (std::size_t i = grades.size(); i > 1; --i) {
      std::swap(grades[i - 1], grades[rng.uniform_index(i)]);
    }

    for (std::size_t d = 0; d < grades.size(); ++d) {
      const int g = grades[d];
      std::vector<double> f(cfg.feature_dim);
      const double r = g / 4.0;
      for (std::size_t j = 0; j < kSignalDims; ++j) {
        f[j] = clamp01(r * signal_weight[j] +
                       cfg.signal_noise * (2.0 * rng.next_double() - 1.0));
      }
      for (std::size_t j = 0; j < kClusterDims; ++j) {
        f[kSignalDims + j] =
            clamp01(centers[g][j] +
                    cfg.cluster_spread * (2.0 * rng.next_double() - 1.0));
      }
      for (std::size_t j = kSignalDims + kClusterDims; j < cfg.feature_dim;
           ++j) {
        f[j] = rng.next_double();
      }
      group.docs.push_back({static_cast<std::int64_t>(d), std::move(f), g});
    }
    ds.queries.push_back(std::move(group));
  }
  return ds;
}

std::vector<std::string> write_fixture(const std::string& dir,
                                       const SyntheticConfig& base,
                                       std::size_t validation_queries,
                                       std::size_t test_queries) {
  const struct {
    Split tag;
    std::size_t queries;
    std::uint64_t seed_offset;
  } splits[3] = {{Split::kTrain, base.n_queries, 0},
                 {Split::kValidation, validation_queries, 1},
                 {Split::kTest, test_queries, 2}};
  std::vector<std::string> paths;
  for (const auto& split : splits) {
    SyntheticConfig cfg = base;
    cfg.n_queries = split.queries;
    cfg.seed = base.seed + split.seed_offset;
    cfg.split_tag = split.tag;
    // Distinct id spaces per split so a fixture can never alias queries.
    cfg.query_prefix = split_name(split.tag) + "_q";
    const Dataset ds = generate_synthetic(cfg);
    std::string path = dir + "/" + split_name(split.tag) + ".txt";
    save_letor_file(ds, path);
    paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace ultr
