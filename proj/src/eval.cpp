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
#include "ultr/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "ultr/common.hpp"
#include "ultr/parallel.hpp"

namespace ultr {

namespace {

double dcg(const std::vector<int>& grades, std::size_t n) {
  const std::size_t len = std::min(n, grades.size());
  CompensatedSum sum;
  for (std::size_t k = 0; k < len; ++k) {
    const int rel = grades[k];
    if (rel < 0 || rel > kMaxRelevanceGrade) {
      throw ValidationError("relevance grade " + std::to_string(rel) +
                            " outside {0..4}");
    }
    sum.add((std::exp2(rel) - 1.0) /
            std::log2(static_cast<double>(k) + 2.0));
  }
  return sum.value();
}

struct RowKey {
  std::string dataset;
  std::string estimator;
  std::string similarity;
  std::size_t top_set;
  double alpha;
  std::size_t n_clicks;
  std::size_t top_n;

  auto tie() const {
    return std::tie(dataset, estimator, similarity, top_set, alpha, n_clicks,
                    top_n);
  }
  bool operator<(const RowKey& o) const { return tie() < o.tie(); }
};

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
  CompensatedSum s;
  for (double x : v) s.add((x - mean) * (x - mean));
  return s.value() / static_cast<double>(v.size() - 1);
}

double two_sided_p(double t, double df) {
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace

double ndcg_at_n(const std::vector<int>& ranked_grades,
                 const std::vector<int>& ideal_grades, std::size_t n) {
  if (n < 1) throw ValidationError("ndcg cutoff must be >= 1");
  const double ideal = dcg(ideal_grades, n);
  if (ideal == 0.0) return 0.0;
  return dcg(ranked_grades, n) / ideal;
}

double ndcg_at_n(const std::vector<int>& ranked_grades, std::size_t n) {
  std::vector<int> ideal = ranked_grades;
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  return ndcg_at_n(ranked_grades, ideal, n);
}

double evaluate_scorer(const Scorer& s, const Dataset& ds, std::size_t n,
                       int threads) {
  if (ds.queries.empty()) throw ValidationError("evaluating an empty dataset");
  std::vector<double> per_query(ds.queries.size());
  parallel_blocks(
      ds.queries.size(), 8,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
          const QueryGroup& q = ds.queries[qi];
          const std::vector<double> scores = score_group(s, q);
          const std::vector<std::size_t> order = rank_by_score(scores);
          std::vector<int> presented(order.size());
          for (std::size_t k = 0; k < order.size(); ++k) {
            presented[k] = q.docs[order[k]].rel;
          }
          per_query[qi] = ndcg_at_n(presented, n);
        }
      },
      threads);
  CompensatedSum sum;
  for (double v : per_query) sum.add(v);
  return sum.value() / static_cast<double>(ds.queries.size());
}

Aggregate aggregate_runs(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("aggregating zero runs");
  Aggregate a;
  a.mean = mean_of(values);
  if (values.size() >= 2) a.std = std::sqrt(sample_var(values, a.mean));
  return a;
}

double t_test(const std::vector<double>& a, const std::vector<double>& b,
              bool paired) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("t-test needs at least 2 values per sample");
  }
  if (paired) {
    if (a.size() != b.size()) {
      throw ValidationError("paired t-test needs equal-length samples");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double md = mean_of(d);
    const double vd = sample_var(d, md);
    if (vd == 0.0) return md == 0.0 ? 1.0 : 0.0;
    const double n = static_cast<double>(d.size());
    return two_sided_p(md / std::sqrt(vd / n), n - 1.0);
  }

  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_var(a, ma);
  const double vb = sample_var(b, mb);
  if (va == 0.0 && vb == 0.0) return ma == mb ? 1.0 : 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  const double se2 = sa + sb;
  const double t = (ma - mb) / std::sqrt(se2);
  // Welch-Satterthwaite degrees of freedom.
  const double df =
      se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  return two_sided_p(t, df);
}

std::string render_report(const std::vector<RunResult>& runs,
                          const std::string& reference_estimator,
                          bool paired) {
  std::map<RowKey, std::vector<double>> groups;
  for (const RunResult& r : runs) {
    groups[{r.dataset, r.estimator, r.similarity, r.top_set, r.alpha,
            r.n_clicks, r.top_n}]
        .push_back(r.ndcg);
  }

  // One reference row per (dataset, n_clicks, top_n) cell.
  std::map<std::tuple<std::string, std::size_t, std::size_t>, const RowKey*>
      refs;
  for (const auto& [key, vals] : groups) {
    (void)vals;
    if (key.estimator != reference_estimator) continue;
    const auto cell = std::make_tuple(key.dataset, key.n_clicks, key.top_n);
    if (refs.count(cell)) {
      throw ConfigError("reference estimator '" + reference_estimator +
                        "' is ambiguous for dataset " + key.dataset);
    }
    refs[cell] = &key;
  }

  std::string out =
      "dataset,estimator,similarity,T,alpha,n_clicks,top_n,mean_ndcg,"
      "std_ndcg,p_vs_ref,marker\n";
  for (const auto& [key, vals] : groups) {
    const Aggregate agg = aggregate_runs(vals);
    const auto cell = std::make_tuple(key.dataset, key.n_clicks, key.top_n);
    const auto ref_it = refs.find(cell);
    if (ref_it == refs.end()) {
      throw ConfigError("no '" + reference_estimator +
                        "' rows to reference for dataset " + key.dataset);
    }
    const std::vector<double>& ref_vals = groups.at(*ref_it->second);

    std::string p_str = "1";
    std::string marker = "none";
    if (&vals != &ref_vals) {
      if (vals.size() >= 2 && ref_vals.size() >= 2) {
        const double p = t_test(vals, ref_vals, paired);
        p_str = format_double(p);
        const double ref_mean = aggregate_runs(ref_vals).mean;
        if (p < 0.05 && agg.mean > ref_mean) {
          marker = "▲";
        } else if (p < 0.05 && agg.mean < ref_mean) {
          marker = "▼";
        }
      } else {
        p_str = "";
      }
    }

    out += key.dataset + ',' + key.estimator + ',' + key.similarity + ',';
    out += std::to_string(key.top_set) + ',';
    append_double(out, key.alpha);
    out += ',' + std::to_string(key.n_clicks) + ',' +
           std::to_string(key.top_n) + ',';
    append_double(out, agg.mean);
    out += ',';
    if (agg.std) append_double(out, *agg.std);
    out += ',' + p_str + ',' + marker + '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double to_double(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError("bad numeric field '" + tok + "'", line_no);
  }
  return v;
}

std::size_t to_size(const std::string& tok, std::size_t line_no) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError("bad integer field '" + tok + "'", line_no);
  }
  return v;
}

}  // namespace

void write_runs_csv(const std::vector<RunResult>& runs, std::ostream& out) {
  out << "dataset,estimator,similarity,T,alpha,n_clicks,top_n,run_id,ndcg\n";
  std::string buf;
  for (const RunResult& r : runs) {
    buf = r.dataset + ',' + r.estimator + ',' + r.similarity + ',';
    buf += std::to_string(r.top_set) + ',';
    append_double(buf, r.alpha);
    buf += ',' + std::to_string(r.n_clicks) + ',' + std::to_string(r.top_n) +
           ',' + std::to_string(r.run_id) + ',';
    append_double(buf, r.ndcg);
    buf += '\n';
    out << buf;
  }
}

std::vector<RunResult> read_runs_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty runs file");
  ++line_no;
  if (line != "dataset,estimator,similarity,T,alpha,n_clicks,top_n,run_id,"
              "ndcg") {
    throw ParseError("unexpected runs header", line_no);
  }
  std::vector<RunResult> runs;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) throw ParseError("expected 9 fields", line_no);
    RunResult r;
    r.dataset = f[0];
    r.estimator = f[1];
    r.similarity = f[2];
    r.top_set = to_size(f[3], line_no);
    r.alpha = to_double(f[4], line_no);
    r.n_clicks = to_size(f[5], line_no);
    r.top_n = to_size(f[6], line_no);
    r.run_id = to_size(f[7], line_no);
    r.ndcg = to_double(f[8], line_no);
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace ultr
