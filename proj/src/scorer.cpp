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
#include "ultr/scorer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

#include "ultr/common.hpp"
#include "ultr/kernels.hpp"
#include "ultr/rng.hpp"

namespace ultr {

namespace {

constexpr std::size_t kHiddenUnits = 32;

void check_shapes(const Scorer& s) {
  if (s.dims.size() < 2 || s.dims.back() != 1) {
    throw ValidationError("scorer must have output dimension 1");
  }
  if (s.weights.size() != s.n_layers() || s.biases.size() != s.n_layers()) {
    throw ValidationError("scorer layer count mismatch");
  }
  for (std::size_t l = 0; l < s.n_layers(); ++l) {
    if (s.weights[l].size() != s.dims[l] * s.dims[l + 1] ||
        s.biases[l].size() != s.dims[l + 1]) {
      throw ValidationError("scorer parameter shape mismatch at layer " +
                            std::to_string(l));
    }
  }
}

}  // namespace

Scorer make_scorer(std::size_t feature_dim, std::uint64_t seed) {
  if (feature_dim == 0) throw ValidationError("feature_dim must be positive");
  Scorer s;
  s.dims = {feature_dim, kHiddenUnits, kHiddenUnits, 1};
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < s.dims.size(); ++l) {
    const std::size_t fan_in = s.dims[l];
    const std::size_t fan_out = s.dims[l + 1];
    const double bound =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> w(fan_in * fan_out);
    for (auto& x : w) x = rng.uniform(-bound, bound);
    s.weights.push_back(std::move(w));
    s.biases.emplace_back(fan_out, 0.0);
  }
  return s;
}

double score(const Scorer& s, const double* features, std::size_t n) {
  ForwardPad pad(s);
  return pad.forward(s, features, n);
}

double score(const Scorer& s, const std::vector<double>& features) {
  return score(s, features.data(), features.size());
}

std::vector<double> score_group(const Scorer& s, const QueryGroup& q) {
  ForwardPad pad(s);
  std::vector<double> out(q.docs.size());
  for (std::size_t d = 0; d < q.docs.size(); ++d) {
    out[d] = pad.forward(s, q.docs[d].features.data(),
                         q.docs[d].features.size());
  }
  return out;
}

std::vector<std::size_t> rank_by_score(const std::vector<double>& scores,
                                       std::size_t top_n) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  if (top_n > 0 && top_n < idx.size()) idx.resize(top_n);
  return idx;
}

ScorerGrad make_grad(const Scorer& s) {
  check_shapes(s);
  ScorerGrad g;
  for (std::size_t l = 0; l < s.n_layers(); ++l) {
    g.weights.emplace_back(s.weights[l].size(), 0.0);
    g.biases.emplace_back(s.biases[l].size(), 0.0);
  }
  return g;
}

void zero_grad(ScorerGrad& g) {
  for (auto& w : g.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
}

void add_grad(ScorerGrad& g, const ScorerGrad& other, double scale) {
  if (g.weights.size() != other.weights.size()) {
    throw ValidationError("gradient shape mismatch");
  }
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    if (g.weights[l].size() != other.weights[l].size() ||
        g.biases[l].size() != other.biases[l].size()) {
      throw ValidationError("gradient shape mismatch");
    }
    kernels::axpy(scale, other.weights[l].data(), g.weights[l].data(),
                  g.weights[l].size());
    kernels::axpy(scale, other.biases[l].data(), g.biases[l].data(),
                  g.biases[l].size());
  }
}

ForwardPad::ForwardPad(const Scorer& s) {
  check_shapes(s);
  for (std::size_t d : s.dims) {
    acts_.emplace_back(d, 0.0);
    delta_.emplace_back(d, 0.0);
  }
}

double ForwardPad::forward(const Scorer& s, const double* features,
                           std::size_t n) {
  if (n != s.feature_dim()) {
    throw ValidationError("feature length " + std::to_string(n) +
                          " does not match scorer input " +
                          std::to_string(s.feature_dim()));
  }
  std::copy(features, features + n, acts_[0].begin());
  for (std::size_t l = 0; l < s.n_layers(); ++l) {
    const std::size_t in = s.dims[l];
    const std::size_t out = s.dims[l + 1];
    const bool hidden = l + 1 < s.n_layers();
    for (std::size_t r = 0; r < out; ++r) {
      const double z = kernels::dot(s.weights[l].data() + r * in,
                                    acts_[l].data(), in) +
                       s.biases[l][r];
      acts_[l + 1][r] = hidden ? std::tanh(z) : z;
    }
  }
  return acts_.back()[0];
}

void ForwardPad::backward(const Scorer& s, double dscore, ScorerGrad& g) {
  // The output layer is linear, so d(loss)/dz at the top is dscore itself.
  delta_.back()[0] = dscore;
  for (std::size_t l = s.n_layers(); l-- > 0;) {
    const std::size_t in = s.dims[l];
    const std::size_t out = s.dims[l + 1];
    auto& dz = delta_[l + 1];
    if (l > 0) std::fill(delta_[l].begin(), delta_[l].end(), 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      kernels::axpy(dz[r], acts_[l].data(), g.weights[l].data() + r * in, in);
      g.biases[l][r] += dz[r];
      if (l > 0) {
        kernels::axpy(dz[r], s.weights[l].data() + r * in, delta_[l].data(),
                      in);
      }
    }
    if (l > 0) {
      // delta_[l] currently holds d(loss)/d(activation); fold in tanh'.
      for (std::size_t c = 0; c < in; ++c) {
        const double a = acts_[l][c];
        delta_[l][c] *= 1.0 - a * a;
      }
    }
  }
}

void apply_update(Scorer& s, const ScorerGrad& g, double lr) {
  for (std::size_t l = 0; l < s.n_layers(); ++l) {
    kernels::axpy(-lr, g.weights[l].data(), s.weights[l].data(),
                  s.weights[l].size());
    kernels::axpy(-lr, g.biases[l].data(), s.biases[l].data(),
                  s.biases[l].size());
  }
}

bool finite_params(const Scorer& s) {
  for (const auto& w : s.weights) {
    for (double v : w) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (const auto& b : s.biases) {
    for (double v : b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void write_scorer(const Scorer& s, std::ostream& out) {
  check_shapes(s);
  out << "mlp 1\n";
  std::string buf = "dims";
  for (std::size_t d : s.dims) {
    buf += ' ';
    buf += std::to_string(d);
  }
  buf += '\n';
  out << buf;
  for (std::size_t l = 0; l < s.n_layers(); ++l) {
    buf = "W" + std::to_string(l);
    for (double v : s.weights[l]) {
      buf += ' ';
      append_double(buf, v);
    }
    buf += '\n';
    out << buf;
    buf = "b" + std::to_string(l);
    for (double v : s.biases[l]) {
      buf += ' ';
      append_double(buf, v);
    }
    buf += '\n';
    out << buf;
  }
}

namespace {

std::vector<double> parse_row(std::istringstream& iss, std::size_t want,
                              std::size_t line_no) {
  std::vector<double> row;
  row.reserve(want);
  std::string tok;
  while (iss >> tok) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      throw ParseError("bad parameter value '" + tok + "'", line_no);
    }
    row.push_back(v);
  }
  if (row.size() != want) {
    throw ParseError("expected " + std::to_string(want) + " values, got " +
                         std::to_string(row.size()),
                     line_no);
  }
  return row;
}

}  // namespace

Scorer read_scorer(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("truncated scorer file");
    ++line_no;
  };

  next_line();
  if (line != "mlp 1") throw ParseError("expected header 'mlp 1'", line_no);
  next_line();
  std::istringstream dims_iss(line);
  std::string tag;
  dims_iss >> tag;
  if (tag != "dims") throw ParseError("expected 'dims' line", line_no);
  Scorer s;
  std::size_t d = 0;
  while (dims_iss >> d) {
    if (d == 0) throw ParseError("zero layer dimension", line_no);
    s.dims.push_back(d);
  }
  if (s.dims.size() < 2 || s.dims.back() != 1) {
    throw ParseError("dims must end in 1 and list at least two sizes",
                     line_no);
  }

  for (std::size_t l = 0; l + 1 < s.dims.size(); ++l) {
    next_line();
    std::istringstream wiss(line);
    wiss >> tag;
    if (tag != "W" + std::to_string(l)) {
      throw ParseError("expected 'W" + std::to_string(l) + "' line", line_no);
    }
    s.weights.push_back(parse_row(wiss, s.dims[l] * s.dims[l + 1], line_no));
    next_line();
    std::istringstream biss(line);
    biss >> tag;
    if (tag != "b" + std::to_string(l)) {
      throw ParseError("expected 'b" + std::to_string(l) + "' line", line_no);
    }
    s.biases.push_back(parse_row(biss, s.dims[l + 1], line_no));
  }
  check_shapes(s);
  return s;
}

void save_scorer(const Scorer& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scorer file: " + path);
  write_scorer(s, out);
}

Scorer load_scorer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scorer file: " + path);
  return read_scorer(in);
}

}  // namespace ultr
