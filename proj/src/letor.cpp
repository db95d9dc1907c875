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
#include "ultr/letor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "ultr/common.hpp"

namespace ultr {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError("bad numeric value '" + std::string(tok) + "'", line_no);
  }
  return v;
}

long parse_long(std::string_view tok, std::size_t line_no) {
  long v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError("bad integer value '" + std::string(tok) + "'", line_no);
  }
  return v;
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

std::size_t Dataset::total_docs() const {
  std::size_t n = 0;
  for (const auto& q : queries) n += q.docs.size();
  return n;
}

double normalize_relevance(int rel) {
  if (rel < 0 || rel > kMaxRelevanceGrade) {
    throw ValidationError("relevance grade " + std::to_string(rel) +
                          " outside {0..4}");
  }
  return static_cast<double>(rel) / kMaxRelevanceGrade;
}

Dataset parse_letor(std::istream& in, Split split,
                    std::size_t feature_dim_override) {
  Dataset ds;
  ds.split_tag = split;
  std::unordered_map<std::string, std::size_t> group_of;
  // sparse[group][doc] holds (fid, value) pairs until feature_dim is known
  std::vector<std::vector<std::vector<std::pair<long, double>>>> sparse;

  std::string line;
  std::size_t line_no = 0;
  long max_fid = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = trim(s.substr(0, hash));
    }
    if (s.empty()) continue;

    const auto sp = s.find(' ');
    if (sp == std::string_view::npos) {
      throw ParseError("expected 'qid:' token after relevance", line_no);
    }
    const long rel = parse_long(trim(s.substr(0, sp)), line_no);
    if (rel < 0 || rel > kMaxRelevanceGrade) {
      throw ValidationError("relevance grade " + std::to_string(rel) +
                            " outside {0..4} at line " +
                            std::to_string(line_no));
    }
    s = trim(s.substr(sp + 1));
    if (s.substr(0, 4) != "qid:") {
      throw ParseError("expected 'qid:' token", line_no);
    }
    auto qid_end = s.find(' ');
    if (qid_end == std::string_view::npos) qid_end = s.size();
    const std::string qid(trim(s.substr(4, qid_end - 4)));
    if (qid.empty()) throw ParseError("empty qid", line_no);
    s = qid_end < s.size() ? trim(s.substr(qid_end + 1)) : std::string_view{};

    std::vector<std::pair<long, double>> feats;
    long prev_fid = 0;
    while (!s.empty()) {
      auto tok_end = s.find(' ');
      if (tok_end == std::string_view::npos) tok_end = s.size();
      const std::string_view tok = s.substr(0, tok_end);
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(
            "expected <fid>:<value>, got '" + std::string(tok) + "'", line_no);
      }
      const long fid = parse_long(tok.substr(0, colon), line_no);
      if (fid <= prev_fid) {
        throw ParseError("feature ids must be strictly increasing", line_no);
      }
      prev_fid = fid;
      feats.emplace_back(fid, parse_double(tok.substr(colon + 1), line_no));
      s = tok_end < s.size() ? trim(s.substr(tok_end + 1)) : std::string_view{};
    }
    max_fid = std::max(max_fid, prev_fid);

    const auto [it, inserted] = group_of.try_emplace(qid, ds.queries.size());
    if (inserted) {
      ds.queries.push_back(QueryGroup{qid, {}});
      sparse.emplace_back();
    }
    auto& group = ds.queries[it->second];
    Document doc;
    doc.doc_id = static_cast<std::int64_t>(group.docs.size());
    doc.rel = static_cast<int>(rel);
    group.docs.push_back(std::move(doc));
    sparse[it->second].push_back(std::move(feats));
  }

  ds.feature_dim = feature_dim_override
                       ? feature_dim_override
                       : static_cast<std::size_t>(max_fid);
  if (feature_dim_override &&
      static_cast<long>(feature_dim_override) < max_fid) {
    throw ValidationError("feature_dim override " +
                          std::to_string(feature_dim_override) +
                          " smaller than max feature id " +
                          std::to_string(max_fid));
  }

  for (std::size_t g = 0; g < ds.queries.size(); ++g) {
    auto& group = ds.queries[g];
    for (std::size_t d = 0; d < group.docs.size(); ++d) {
      auto& doc = group.docs[d];
      doc.features.assign(ds.feature_dim, 0.0);
      for (const auto& [fid, val] : sparse[g][d]) {
        doc.features[static_cast<std::size_t>(fid - 1)] = val;
      }
    }
  }
  return ds;
}

Dataset load_letor_file(const std::string& path, Split split,
                        std::size_t feature_dim_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);
  return parse_letor(in, split, feature_dim_override);
}

void write_letor(const Dataset& ds, std::ostream& out) {
  std::string buf;
  for (const auto& q : ds.queries) {
    for (const auto& d : q.docs) {
      buf.clear();
      buf += std::to_string(d.rel);
      buf += " qid:";
      buf += q.query_id;
      for (std::size_t f = 0; f < d.features.size(); ++f) {
        buf += ' ';
        buf += std::to_string(f + 1);
        buf += ':';
        append_double(buf, d.features[f]);
      }
      buf += '\n';
      out << buf;
    }
  }
}

void save_letor_file(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset file: " + path);
  write_letor(ds, out);
}

ScalingStats compute_scaling_stats(const Dataset& train) {
  if (train.queries.empty()) {
    throw ValidationError("cannot compute scaling statistics on an empty dataset");
  }
  ScalingStats st;
  st.min.assign(train.feature_dim, std::numeric_limits<double>::infinity());
  st.max.assign(train.feature_dim, -std::numeric_limits<double>::infinity());
  for (const auto& q : train.queries) {
    for (const auto& d : q.docs) {
      for (std::size_t f = 0; f < train.feature_dim; ++f) {
        const double v = d.features[f];
        if (!std::isfinite(v)) {
          throw ValidationError("non-finite feature value in query " +
                                q.query_id);
        }
        st.min[f] = std::min(st.min[f], v);
        st.max[f] = std::max(st.max[f], v);
      }
    }
  }
  return st;
}

Dataset scale_features(const Dataset& ds, const ScalingStats& stats) {
  if (stats.min.size() != ds.feature_dim) {
    throw ValidationError("scaling statistics dimension mismatch");
  }
  Dataset out = ds;
  for (auto& q : out.queries) {
    for (auto& d : q.docs) {
      for (std::size_t f = 0; f < out.feature_dim; ++f) {
        const double v = d.features[f];
        if (!std::isfinite(v)) {
          throw ValidationError("non-finite feature value in query " +
                                q.query_id);
        }
        const double range = stats.max[f] - stats.min[f];
        if (range <= 0.0) {
          d.features[f] = 0.0;
        } else {
          d.features[f] =
              std::clamp((v - stats.min[f]) / range, 0.0, 1.0);
        }
      }
    }
  }
  return out;
}

void write_scaling_stats(const ScalingStats& stats, std::ostream& out) {
  std::string buf;
  for (std::size_t f = 0; f < stats.min.size(); ++f) {
    buf.clear();
    buf += std::to_string(f + 1);
    buf += ' ';
    append_double(buf, stats.min[f]);
    buf += ' ';
    append_double(buf, stats.max[f]);
    buf += '\n';
    out << buf;
  }
}

ScalingStats read_scaling_stats(std::istream& in) {
  ScalingStats st;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    const auto sp1 = s.find(' ');
    const auto sp2 = s.find(' ', sp1 + 1);
    if (sp1 == std::string_view::npos || sp2 == std::string_view::npos) {
      throw ParseError("expected 'fid min max'", line_no);
    }
    const long fid = parse_long(s.substr(0, sp1), line_no);
    if (fid != static_cast<long>(st.min.size()) + 1) {
      throw ParseError("feature ids must be 1..d in order", line_no);
    }
    st.min.push_back(parse_double(s.substr(sp1 + 1, sp2 - sp1 - 1), line_no));
    st.max.push_back(parse_double(s.substr(sp2 + 1), line_no));
  }
  return st;
}

void save_scaling_stats(const ScalingStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scaling stats: " + path);
  write_scaling_stats(stats, out);
}

ScalingStats load_scaling_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scaling stats: " + path);
  return read_scaling_stats(in);
}

std::map<std::size_t, std::size_t> query_doc_histogram(const Dataset& ds) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& q : ds.queries) ++hist[q.docs.size()];
  return hist;
}

void write_histogram_csv(const std::map<std::size_t, std::size_t>& hist,
                         std::ostream& out) {
  out << "doc_count,query_count\n";
  for (const auto& [docs, queries] : hist) {
    out << docs << ',' << queries << '\n';
  }
}

}  // namespace ultr
