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
#ifndef ULTR_KERNELS_HPP_
#define ULTR_KERNELS_HPP_

#include <cstddef>
#include <string>

// Dense double kernels behind the similarity measures and the MLP forward /
// backward passes. Scalar reference implementations define the semantics;
// the AVX2 variants use the same 4-lane accumulator arrangement and the same
// combine order, so both produce bit-identical results (the build disables
// FP contraction). Dispatch is resolved once at runtime from CPUID and can
// be forced for testing.

namespace ultr::kernels {

enum class Impl { kAuto, kScalar, kAvx2 };

/// Selects the implementation. kAuto picks AVX2 when the CPU supports it.
/// Throws ConfigError when an unavailable implementation is requested.
void set_impl(Impl impl);
Impl active_impl();
std::string impl_name();
Impl parse_impl(const std::string& name);

bool avx2_compiled();
bool avx2_supported();

double dot(const double* a, const double* b, std::size_t n);
double l1_distance(const double* a, const double* b, std::size_t n);
double l2_distance_sq(const double* a, const double* b, std::size_t n);
/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double l1_distance(const double* a, const double* b, std::size_t n);
double l2_distance_sq(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(ULTR_AVX2_BUILT)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double l1_distance(const double* a, const double* b, std::size_t n);
double l2_distance_sq(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace ultr::kernels

#endif  // ULTR_KERNELS_HPP_
