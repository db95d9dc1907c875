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
#include "ultr/click_sim.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ultr/click_model.hpp"
#include "ultr/common.hpp"
#include "ultr/parallel.hpp"
#include "ultr/rng.hpp"

namespace ultr {

std::vector<std::int32_t> produce_ranking(const Scorer& scorer,
                                          const QueryGroup& query,
                                          std::size_t top_n) {
  const auto order = rank_by_score(score_group(scorer, query), top_n);
  std::vector<std::int32_t> ranking(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    ranking[i] = static_cast<std::int32_t>(order[i]);
  }
  return ranking;
}

Scorer train_logging_policy(const Dataset& ds, double fraction,
                            const TrainConfig& cfg) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ValidationError("logging policy fraction must be in (0, 1]");
  }
  if (ds.queries.empty()) {
    throw ValidationError("cannot train a logging policy on an empty dataset");
  }
  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(fraction *
                                  static_cast<double>(ds.queries.size())));
  Dataset sub;
  sub.feature_dim = ds.feature_dim;
  sub.split_tag = ds.split_tag;
  sub.queries.assign(ds.queries.begin(),
                     ds.queries.begin() + static_cast<std::ptrdiff_t>(n));
  return train_ranker(sub, relevance_targets(sub), cfg).scorer;
}

ClickLog simulate_clicks(const Dataset& ds, const Scorer& logging_policy,
                         const SimConfig& cfg) {
  if (ds.queries.empty()) throw ValidationError("simulating on an empty dataset");
  if (cfg.top_n < 1) throw ValidationError("top_n must be at least 1");
  if (cfg.target_clicks < 1) {
    throw ValidationError("target click count must be at least 1");
  }

  // The logging policy is deterministic, so each query has one fixed page.
  const std::size_t n_queries = ds.queries.size();
  std::vector<std::vector<std::int32_t>> pages(n_queries);
  std::vector<std::vector<double>> page_rel(n_queries);
  for (std::size_t q = 0; q < n_queries; ++q) {
    pages[q] = produce_ranking(logging_policy, ds.queries[q], cfg.top_n);
    page_rel[q].resize(pages[q].size());
    for (std::size_t k = 0; k < pages[q].size(); ++k) {
      page_rel[q][k] = normalize_relevance(
          ds.queries[q].docs[static_cast<std::size_t>(pages[q][k])].rel);
    }
  }

  // Sessions are generated in chunks; session s always uses substream s, so
  // the log depends only on the seed, never on chunking or thread count.
  constexpr std::size_t kChunk = 1024;
  ClickLog log;
  log.top_n = cfg.top_n;
  std::size_t next_session = 0;
  while (log.total_clicks < cfg.target_clicks) {
    std::vector<Session> chunk(kChunk);
    parallel_blocks(
        kChunk, 64,
        [&](std::size_t, std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i) {
            Rng rng(cfg.seed, next_session + i);
            Session& s = chunk[i];
            s.query_index = rng.uniform_index(n_queries);
            s.ranking = pages[s.query_index];
            s.clicks.resize(s.ranking.size());
            for (std::size_t k = 0; k < s.ranking.size(); ++k) {
              const double p = click_prob(k + 1, page_rel[s.query_index][k]);
              s.clicks[k] = rng.bernoulli(p) ? 1 : 0;
            }
          }
        },
        cfg.threads);
    next_session += kChunk;
    for (auto& s : chunk) {
      std::size_t clicked = 0;
      for (const auto c : s.clicks) clicked += c;
      log.total_clicks += clicked;
      log.sessions.push_back(std::move(s));
      if (log.total_clicks >= cfg.target_clicks) break;
    }
  }
  return log;
}

std::vector<std::size_t> sessions_per_query(const ClickLog& log,
                                            std::size_t n_queries) {
  std::vector<std::size_t> counts(n_queries, 0);
  for (const Session& s : log.sessions) {
    if (s.query_index >= n_queries) {
      throw ValidationError("session references query index " +
                            std::to_string(s.query_index));
    }
    ++counts[s.query_index];
  }
  return counts;
}

void write_click_log(const ClickLog& log, const Dataset& ds,
                     std::ostream& out) {
  out << "session_id,query_id,position,doc_id,clicked\n";
  std::string buf;
  for (std::size_t sid = 0; sid < log.sessions.size(); ++sid) {
    const Session& s = log.sessions[sid];
    const QueryGroup& q = ds.queries.at(s.query_index);
    for (std::size_t k = 0; k < s.ranking.size(); ++k) {
      buf = std::to_string(sid);
      buf += ',';
      buf += q.query_id;
      buf += ',';
      buf += std::to_string(k + 1);
      buf += ',';
      buf += std::to_string(
          q.docs.at(static_cast<std::size_t>(s.ranking[k])).doc_id);
      buf += ',';
      buf += s.clicks[k] ? '1' : '0';
      buf += '\n';
      out << buf;
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

long parse_long(const std::string& s, std::size_t line_no, const char* what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad " + std::string(what) + " '" + s + "'", line_no);
  }
  return value;
}

}  // namespace

ClickLog read_click_log(std::istream& in, const Dataset& ds) {
  std::unordered_map<std::string, std::size_t> query_index;
  std::vector<std::unordered_map<std::int64_t, std::size_t>> doc_index(
      ds.queries.size());
  for (std::size_t q = 0; q < ds.queries.size(); ++q) {
    query_index[ds.queries[q].query_id] = q;
    for (std::size_t d = 0; d < ds.queries[q].docs.size(); ++d) {
      doc_index[q][ds.queries[q].docs[d].doc_id] = d;
    }
  }

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) ||
      line != "session_id,query_id,position,doc_id,clicked") {
    throw ParseError("bad click log header", 1);
  }

  ClickLog log;
  long current_sid = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) {
      throw ParseError("expected 5 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const long sid = parse_long(fields[0], line_no, "session id");
    const long position = parse_long(fields[2], line_no, "position");
    const long doc_id = parse_long(fields[3], line_no, "doc id");
    const long clicked = parse_long(fields[4], line_no, "click flag");

    const auto qit = query_index.find(fields[1]);
    if (qit == query_index.end()) {
      throw ValidationError("unknown query id '" + fields[1] + "' at line " +
                            std::to_string(line_no));
    }
    if (clicked != 0 && clicked != 1) {
      throw ValidationError("click flag must be 0 or 1 at line " +
                            std::to_string(line_no));
    }

    if (sid != current_sid) {
      if (sid != current_sid + 1) {
        throw ValidationError("session ids must be consecutive at line " +
                              std::to_string(line_no));
      }
      current_sid = sid;
      Session s;
      s.query_index = qit->second;
      log.sessions.push_back(std::move(s));
    }
    Session& s = log.sessions.back();
    if (s.query_index != qit->second) {
      throw ValidationError("session " + std::to_string(sid) +
                            " mixes query ids at line " +
                            std::to_string(line_no));
    }
    if (position != static_cast<long>(s.ranking.size()) + 1) {
      throw ValidationError("positions must be 1-based and sequential at line " +
                            std::to_string(line_no));
    }
    const auto dit = doc_index[qit->second].find(doc_id);
    if (dit == doc_index[qit->second].end()) {
      throw ValidationError("doc id " + std::to_string(doc_id) +
                            " not in query '" + fields[1] + "' at line " +
                            std::to_string(line_no));
    }
    s.ranking.push_back(static_cast<std::int32_t>(dit->second));
    s.clicks.push_back(static_cast<std::uint8_t>(clicked));
    log.total_clicks += static_cast<std::size_t>(clicked);
  }
  for (const Session& s : log.sessions) {
    log.top_n = std::max(log.top_n, s.ranking.size());
  }
  return log;
}

void save_click_log(const ClickLog& log, const Dataset& ds,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_click_log(log, ds, out);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

ClickLog load_click_log(const std::string& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_click_log(in, ds);
}

}  // namespace ultr
