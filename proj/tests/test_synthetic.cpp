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
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "ultr/common.hpp"
#include "ultr/letor.hpp"
#include "ultr/synthetic.hpp"

using namespace ultr;

namespace {

std::string as_text(const Dataset& ds) {
  std::ostringstream out;
  write_letor(ds, out);
  return out.str();
}

std::filesystem::path temp_dir(const char* tag) {
  auto dir = std::filesystem::temp_directory_path() /
             (std::string("ultr_synth_") + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("generated corpus has the configured shape") {
  SyntheticConfig cfg;
  cfg.n_queries = 7;
  cfg.docs_per_query = 20;
  cfg.grade_counts = {8, 5, 4, 2, 1};
  cfg.feature_dim = 10;
  cfg.seed = 3;
  cfg.query_prefix = "syn_q";
  const Dataset ds = generate_synthetic(cfg);

  REQUIRE(ds.queries.size() == 7);
  CHECK(ds.feature_dim == 10);
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    const auto& group = ds.queries[q];
    CHECK(group.query_id == "syn_q" + std::to_string(q));
    REQUIRE(group.docs.size() == 20);
    std::array<std::size_t, 5> histogram{};
    for (std::size_t d = 0; d < group.docs.size(); ++d) {
      const auto& doc = group.docs[d];
      CHECK(doc.doc_id == static_cast<std::int64_t>(d));
      REQUIRE(doc.features.size() == 10);
      for (const double f : doc.features) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
      }
      REQUIRE(doc.rel >= 0);
      REQUIRE(doc.rel <= 4);
      ++histogram[static_cast<std::size_t>(doc.rel)];
    }
    for (int g = 0; g < 5; ++g) {
      CHECK(histogram[static_cast<std::size_t>(g)] ==
            cfg.grade_counts[static_cast<std::size_t>(g)]);
    }
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  SyntheticConfig cfg;
  cfg.n_queries = 5;
  cfg.docs_per_query = 12;
  cfg.grade_counts = {4, 3, 2, 2, 1};
  cfg.feature_dim = 9;
  cfg.seed = 11;

  const std::string a = as_text(generate_synthetic(cfg));
  const std::string b = as_text(generate_synthetic(cfg));
  CHECK(a == b);

  cfg.seed = 12;
  CHECK(as_text(generate_synthetic(cfg)) != a);
}

TEST_CASE("per-query substreams: extending the corpus keeps old queries") {
  SyntheticConfig small;
  small.n_queries = 3;
  small.docs_per_query = 10;
  small.grade_counts = {4, 2, 2, 1, 1};
  small.feature_dim = 8;
  small.seed = 21;
  SyntheticConfig big = small;
  big.n_queries = 6;

  const Dataset a = generate_synthetic(small);
  const Dataset b = generate_synthetic(big);
  for (std::size_t q = 0; q < 3; ++q) {
    CHECK(as_text({{a.queries[q]}, a.feature_dim, a.split_tag}) ==
          as_text({{b.queries[q]}, b.feature_dim, b.split_tag}));
  }
}

TEST_CASE("grades are shuffled within each query") {
  SyntheticConfig cfg;
  cfg.n_queries = 10;
  cfg.docs_per_query = 30;
  cfg.grade_counts = {12, 8, 5, 3, 2};
  cfg.feature_dim = 8;
  cfg.seed = 4;
  const Dataset ds = generate_synthetic(cfg);

  // With 30 docs per query the chance any one query comes out grade-sorted
  // is astronomically small; all ten sorted would mean no shuffle at all.
  std::size_t sorted = 0;
  for (const auto& q : ds.queries) {
    bool ascending = true;
    for (std::size_t d = 1; d < q.docs.size(); ++d) {
      if (q.docs[d].rel < q.docs[d - 1].rel) ascending = false;
    }
    if (ascending) ++sorted;
  }
  CHECK(sorted == 0);
}

TEST_CASE("leading dims carry the relevance signal") {
  SyntheticConfig cfg;
  cfg.n_queries = 20;
  cfg.docs_per_query = 30;
  cfg.grade_counts = {12, 8, 5, 3, 2};
  cfg.feature_dim = 8;
  cfg.signal_noise = 0.08;
  cfg.seed = 7;
  const Dataset ds = generate_synthetic(cfg);

  double low = 0.0, high = 0.0;
  std::size_t n_low = 0, n_high = 0;
  for (const auto& q : ds.queries) {
    for (const auto& doc : q.docs) {
      if (doc.rel == 0) {
        low += doc.features[0];
        ++n_low;
      } else if (doc.rel == 4) {
        high += doc.features[0];
        ++n_high;
      }
    }
  }
  // Grade 4 centers dim 0 at 1.0, grade 0 at 0.0, noise at most 0.08.
  CHECK(high / static_cast<double>(n_high) > 0.9);
  CHECK(low / static_cast<double>(n_low) < 0.1);
}

TEST_CASE("same-grade documents cluster in the middle dims") {
  SyntheticConfig cfg;
  cfg.n_queries = 12;
  cfg.docs_per_query = 30;
  cfg.grade_counts = {12, 8, 5, 3, 2};
  cfg.feature_dim = 12;
  cfg.cluster_spread = 0.04;
  cfg.seed = 13;
  const Dataset ds = generate_synthetic(cfg);

  auto cluster_dist = [](const Document& a, const Document& b) {
    double s = 0.0;
    for (std::size_t j = 4; j < 8; ++j) {
      const double d = a.features[j] - b.features[j];
      s += d * d;
    }
    return std::sqrt(s);
  };

  double same = 0.0, cross = 0.0;
  std::size_t n_same = 0, n_cross = 0;
  for (const auto& q : ds.queries) {
    for (std::size_t i = 0; i < q.docs.size(); ++i) {
      for (std::size_t j = i + 1; j < q.docs.size(); ++j) {
        const double d = cluster_dist(q.docs[i], q.docs[j]);
        if (q.docs[i].rel == q.docs[j].rel) {
          same += d;
          ++n_same;
        } else {
          cross += d;
          ++n_cross;
        }
      }
    }
  }
  // Same-grade pairs share a center, so their gap is bounded by the jitter
  // diameter while cross-grade pairs sit at random-center distances.
  const double mean_same = same / static_cast<double>(n_same);
  const double mean_cross = cross / static_cast<double>(n_cross);
  CHECK(mean_same < 2.0 * 0.04 * 2.0);
  CHECK(mean_cross > 4.0 * mean_same);
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig cfg;
  cfg.n_queries = 2;
  cfg.docs_per_query = 10;
  cfg.grade_counts = {4, 2, 2, 1, 1};
  cfg.feature_dim = 8;
  CHECK_NOTHROW(generate_synthetic(cfg));

  SyntheticConfig bad = cfg;
  bad.n_queries = 0;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);

  bad = cfg;
  bad.feature_dim = 7;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);

  bad = cfg;
  bad.grade_counts = {4, 2, 2, 1};
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);

  bad = cfg;
  bad.grade_counts = {4, 2, 2, 1, 2};  // sums to 11, not 10
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);

  bad = cfg;
  bad.signal_noise = -0.1;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
}

TEST_CASE("write_fixture lays out three loadable splits") {
  const auto dir = temp_dir("fixture");
  SyntheticConfig base;
  base.n_queries = 6;
  base.docs_per_query = 10;
  base.grade_counts = {4, 2, 2, 1, 1};
  base.feature_dim = 8;
  base.seed = 31;

  const auto paths = write_fixture(dir.string(), base, 3, 2);
  REQUIRE(paths.size() == 3);
  CHECK(paths[0] == dir.string() + "/train.txt");
  CHECK(paths[1] == dir.string() + "/validation.txt");
  CHECK(paths[2] == dir.string() + "/test.txt");

  const Dataset train = load_letor_file(paths[0], Split::kTrain);
  const Dataset validation = load_letor_file(paths[1], Split::kValidation);
  const Dataset test = load_letor_file(paths[2], Split::kTest);
  CHECK(train.queries.size() == 6);
  CHECK(validation.queries.size() == 3);
  CHECK(test.queries.size() == 2);
  CHECK(train.queries[0].query_id == "train_q0");
  CHECK(validation.queries[0].query_id == "validation_q0");
  CHECK(test.queries[0].query_id == "test_q0");

  // Each split draws from its own seed, so the contents differ even at
  // equal query counts.
  SyntheticConfig probe = base;
  probe.n_queries = 2;
  probe.seed = base.seed + 2;
  probe.split_tag = Split::kTest;
  probe.query_prefix = "test_q";
  CHECK(as_text(test) == as_text(generate_synthetic(probe)));
  probe.seed = base.seed;
  CHECK(as_text(test) != as_text(generate_synthetic(probe)));

  std::filesystem::remove_all(dir);
}
