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
#ifndef ULTR_CLICK_SIM_HPP_
#define ULTR_CLICK_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ultr/letor.hpp"
#include "ultr/ranker.hpp"
#include "ultr/scorer.hpp"

namespace ultr {

// One simulated result page: the logging policy's top-n ranking for a query
// plus the click outcome at each shown position.
struct Session {
  std::size_t query_index = 0;        // index into Dataset::queries
  std::vector<std::int32_t> ranking;  // doc indices, best first
  std::vector<std::uint8_t> clicks;   // parallel to ranking, 0 or 1
};

struct ClickLog {
  std::vector<Session> sessions;
  std::size_t top_n = 0;        // positions shown per session
  std::size_t total_clicks = 0;
};

struct SimConfig {
  std::size_t target_clicks = 10000;  // stop once this many clicks are logged
  std::size_t top_n = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

// Deterministic ranking induced by the scorer: descending score, document
// index breaking ties, truncated to top_n (0 keeps everything).
std::vector<std::int32_t> produce_ranking(const Scorer& scorer,
                                          const QueryGroup& query,
                                          std::size_t top_n);

// Trains the weak logging policy on the true relevance targets of a small
// prefix of the training queries (floor(fraction * n), at least one query).
Scorer train_logging_policy(const Dataset& ds, double fraction,
                            const TrainConfig& cfg);

// Simulates result pages under the position-biased examination model until
// at least cfg.target_clicks clicks accumulate; never splits a session.
// Session s draws from its own substream, so the log is reproducible and
// independent of the thread count.
ClickLog simulate_clicks(const Dataset& ds, const Scorer& logging_policy,
                         const SimConfig& cfg);

// Sessions per query index, e.g. for sanity-checking coverage.
std::vector<std::size_t> sessions_per_query(const ClickLog& log,
                                            std::size_t n_queries);

void write_click_log(const ClickLog& log, const Dataset& ds,
                     std::ostream& out);
// Validates doc ids and query ids against the dataset and rebuilds the
// per-session structure; throws ParseError or ValidationError on bad rows.
ClickLog read_click_log(std::istream& in, const Dataset& ds);

void save_click_log(const ClickLog& log, const Dataset& ds,
                    const std::string& path);
ClickLog load_click_log(const std::string& path, const Dataset& ds);

}  // namespace ultr

#endif  // ULTR_CLICK_SIM_HPP_
