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
#include "ultr/kernels.hpp"

#include <cmath>

#include "ultr/common.hpp"

namespace ultr::kernels {

namespace scalar {

// 4 independent accumulators, element i feeds accumulator i % 4, combined as
// (acc0 + acc1) + (acc2 + acc3), matching the AVX2 lane arrangement exactly.

double dot(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += a[i + 0] * b[i + 0];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  double sum = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += std::fabs(a[i + 0] - b[i + 0]);
    acc1 += std::fabs(a[i + 1] - b[i + 1]);
    acc2 += std::fabs(a[i + 2] - b[i + 2]);
    acc3 += std::fabs(a[i + 3] - b[i + 3]);
  }
  double sum = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) sum += std::fabs(a[i] - b[i]);
  return sum;
}

double l2_distance_sq(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i + 0] - b[i + 0];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    acc0 += d0 * d0;
    acc1 += d1 * d1;
    acc2 += d2 * d2;
    acc3 += d3 * d3;
  }
  double sum = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace scalar

bool avx2_compiled() {
#if defined(ULTR_AVX2_BUILT)
  return true;
#else
  return false;
#endif
}

bool avx2_supported() {
#if defined(ULTR_AVX2_BUILT) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

Impl g_active = Impl::kScalar;
bool g_resolved = false;

void resolve_auto() {
  g_active = avx2_supported() ? Impl::kAvx2 : Impl::kScalar;
  g_resolved = true;
}

inline Impl active() {
  if (!g_resolved) resolve_auto();
  return g_active;
}

}  // namespace

void set_impl(Impl impl) {
  if (impl == Impl::kAuto) {
    resolve_auto();
    return;
  }
  if (impl == Impl::kAvx2 && !avx2_supported()) {
    throw ConfigError("avx2 kernels requested but not available on this CPU");
  }
  g_active = impl;
  g_resolved = true;
}

Impl active_impl() { return active(); }

std::string impl_name() {
  return active() == Impl::kAvx2 ? "avx2" : "scalar";
}

Impl parse_impl(const std::string& name) {
  if (name == "auto") return Impl::kAuto;
  if (name == "scalar") return Impl::kScalar;
  if (name == "avx2") return Impl::kAvx2;
  throw ConfigError("unknown kernel implementation: " + name);
}

#if defined(ULTR_AVX2_BUILT)
#define ULTR_DISPATCH(fn, ...)                                    \
  return active() == Impl::kAvx2 ? avx2::fn(__VA_ARGS__)          \
                                 : scalar::fn(__VA_ARGS__)
#else
#define ULTR_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
  ULTR_DISPATCH(dot, a, b, n);
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  ULTR_DISPATCH(l1_distance, a, b, n);
}

double l2_distance_sq(const double* a, const double* b, std::size_t n) {
  ULTR_DISPATCH(l2_distance_sq, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  ULTR_DISPATCH(axpy, alpha, x, y, n);
}

#undef ULTR_DISPATCH

}  // namespace ultr::kernels
