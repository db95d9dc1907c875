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
#ifndef ULTR_LETOR_HPP_
#define ULTR_LETOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ultr {

inline constexpr int kMaxRelevanceGrade = 4;

struct Document {
  std::int64_t doc_id = 0;  // position of the document within its group
  std::vector<double> features;
  int rel = 0;  // graded relevance in {0..4}
};

struct QueryGroup {
  std::string query_id;
  std::vector<Document> docs;
};

enum class Split { kTrain, kValidation, kTest };

std::string split_name(Split s);

/// Immutable after construction; safe to share across threads.
struct Dataset {
  std::vector<QueryGroup> queries;
  std::size_t feature_dim = 0;
  Split split_tag = Split::kTrain;

  std::size_t total_docs() const;
};

/// Maps a {0..4} grade onto [0,1] as rel/4.
double normalize_relevance(int rel);

/// Parses LETOR/SVMlight lines `<rel> qid:<id> <fid>:<val> ... [# comment]`.
/// Feature ids are 1-based and must be strictly increasing per line; absent
/// ids are filled with 0. Groups preserve first-occurrence order of qids and
/// file order of documents. feature_dim is the max fid seen, or
/// `feature_dim_override` when non-zero.
Dataset parse_letor(std::istream& in, Split split = Split::kTrain,
                    std::size_t feature_dim_override = 0);
Dataset load_letor_file(const std::string& path, Split split = Split::kTrain,
                        std::size_t feature_dim_override = 0);

/// Writes the dataset back out with dense features (every fid emitted) so
/// that parse(write(d)) == d including feature_dim.
void write_letor(const Dataset& ds, std::ostream& out);
void save_letor_file(const Dataset& ds, const std::string& path);

/// Per-feature min/max collected from a training split.
struct ScalingStats {
  std::vector<double> min;
  std::vector<double> max;
};

ScalingStats compute_scaling_stats(const Dataset& train);

/// Min-max scales every feature into [0,1] with the given statistics.
/// Dimensions with max == min map to 0. Values outside the training range
/// are clamped. Throws ValidationError on non-finite features.
Dataset scale_features(const Dataset& ds, const ScalingStats& stats);

void write_scaling_stats(const ScalingStats& stats, std::ostream& out);
ScalingStats read_scaling_stats(std::istream& in);
void save_scaling_stats(const ScalingStats& stats, const std::string& path);
ScalingStats load_scaling_stats(const std::string& path);

/// doc_count -> number of queries with that many documents.
std::map<std::size_t, std::size_t> query_doc_histogram(const Dataset& ds);

/// Emits `doc_count,query_count` rows in ascending doc_count order.
void write_histogram_csv(const std::map<std::size_t, std::size_t>& hist,
                         std::ostream& out);

}  // namespace ultr

#endif  // ULTR_LETOR_HPP_
