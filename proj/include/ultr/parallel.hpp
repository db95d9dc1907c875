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
#ifndef ULTR_PARALLEL_HPP_
#define ULTR_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace ultr {

/// Worker count used by parallel_blocks when the caller passes 0.
/// Set once at startup from the --threads flag / config.
void set_default_threads(int n);
int default_threads();

/// Runs fn(block_index, begin, end) over [0, n) split into fixed-size blocks.
/// The block partition depends only on block_size, never on the worker
/// count, so per-block outputs combined in block order are identical for
/// every thread count. fn must only write to its own block's output slot.
void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn,
                     int threads = 0);

}  // namespace ultr

#endif  // ULTR_PARALLEL_HPP_
