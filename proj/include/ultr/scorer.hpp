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
#ifndef ULTR_SCORER_HPP_
#define ULTR_SCORER_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ultr/letor.hpp"

// Small MLP scorer (feature_dim -> 32 -> 32 -> 1, tanh hidden layers) used
// as the logging policy, the learned ranker, and the regression model of
// the doubly robust estimators. Plain structs; training lives in ranker.

namespace ultr {

struct Scorer {
  // dims = {feature_dim, hidden..., 1}; weights[l] is dims[l+1] x dims[l]
  // row-major, biases[l] has dims[l+1] entries.
  std::vector<std::size_t> dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  std::size_t feature_dim() const { return dims.front(); }
  std::size_t n_layers() const { return dims.size() - 1; }
};

/// Glorot-uniform initialized scorer with two 32-unit hidden layers.
Scorer make_scorer(std::size_t feature_dim, std::uint64_t seed);

/// Deterministic forward pass. Throws ValidationError on dimension mismatch.
double score(const Scorer& s, const double* features, std::size_t n);
double score(const Scorer& s, const std::vector<double>& features);

/// Scores every document of the group in document order.
std::vector<double> score_group(const Scorer& s, const QueryGroup& q);

/// Indices of the group's documents sorted by descending score, ties broken
/// by ascending doc_id, truncated to top_n (0 keeps everything).
std::vector<std::size_t> rank_by_score(const std::vector<double>& scores,
                                       std::size_t top_n = 0);

// Gradient buffers matching a scorer's parameter shapes. Backprop caches the
// hidden activations per document so per-query accumulation reuses one pad.
struct ScorerGrad {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

ScorerGrad make_grad(const Scorer& s);
void zero_grad(ScorerGrad& g);
/// g += scale * other, shape-checked.
void add_grad(ScorerGrad& g, const ScorerGrad& other, double scale);

class ForwardPad {
 public:
  explicit ForwardPad(const Scorer& s);
  /// Forward pass that retains activations for a following backward().
  double forward(const Scorer& s, const double* features, std::size_t n);
  /// Accumulates d(loss)/d(params) into g given dscore = d(loss)/d(output)
  /// for the most recent forward() input.
  void backward(const Scorer& s, double dscore, ScorerGrad& g);

 private:
  std::vector<std::vector<double>> acts_;   // acts_[0] = input copy
  std::vector<std::vector<double>> delta_;  // per-layer backprop scratch
};

/// Gradient-descent step: params -= lr * grad.
void apply_update(Scorer& s, const ScorerGrad& g, double lr);

bool finite_params(const Scorer& s);

// Versioned text serialization: header line `mlp 1`, then `dims d0 ... dk`,
// then one `W<l>` line per layer (row-major) and one `b<l>` line.
void write_scorer(const Scorer& s, std::ostream& out);
Scorer read_scorer(std::istream& in);
void save_scorer(const Scorer& s, const std::string& path);
Scorer load_scorer(const std::string& path);

}  // namespace ultr

#endif  // ULTR_SCORER_HPP_
