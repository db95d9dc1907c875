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
#ifndef ULTR_PIPELINE_HPP_
#define ULTR_PIPELINE_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultr/config.hpp"
#include "ultr/estimators.hpp"

namespace ultr {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One point of the experiment grid. Estimators without a similarity term
// occupy a single cell with measure "-" and top_set/alpha pinned to 0;
// mips_ltr and drm expand over similarities only.
struct GridCell {
  EstimatorKind kind = EstimatorKind::kIps;
  std::string similarity = "-";
  std::size_t top_set = 0;
  double alpha = 0.0;

  std::string label() const;  // file-name-safe cell id
};

std::vector<GridCell> expand_grid(const ExperimentConfig& cfg);

// Artifact locations under <output_dir>/run-<config_stamp>.
struct RunPaths {
  explicit RunPaths(const ExperimentConfig& cfg);

  std::string dir;
  std::string resolved_config() const;
  std::string dataset(Split split) const;  // prepared LETOR file
  std::string scaling_stats() const;
  std::string logging_policy() const;
  std::string clicks() const;
  std::string targets(const GridCell& cell) const;
  std::string scorer(const GridCell& cell, std::size_t run) const;
  std::string loss(const GridCell& cell, std::size_t run) const;
  std::string runs() const;
  std::string report() const;
};

// Each stage reads only persisted artifacts of earlier stages and writes
// its own, so any stage can be re-run in isolation.
void stage_prepare(const ExperimentConfig& cfg);
void stage_train_logging(const ExperimentConfig& cfg);
void stage_simulate(const ExperimentConfig& cfg);
void stage_estimate(const ExperimentConfig& cfg);
void stage_train(const ExperimentConfig& cfg);
void stage_evaluate(const ExperimentConfig& cfg);
void stage_report(const ExperimentConfig& cfg);

// All stages in order. A failing stage aborts with its name and cause;
// artifacts written so far are retained. Returns the run directory.
std::string run_pipeline(const ExperimentConfig& cfg);

}  // namespace ultr

#endif  // ULTR_PIPELINE_HPP_
