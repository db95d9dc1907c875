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
#ifndef ULTR_COMMON_HPP_
#define ULTR_COMMON_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ultr {

/// Malformed input data (bad LETOR line, bad CSV row). Carries a 1-based
/// line number when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"),
        line_(line_no) {}
  explicit ParseError(const std::string& msg)
      : std::runtime_error(msg), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain contract (label out of range,
/// dimension mismatch, non-finite feature).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unusable configuration (empty grid, missing file, zero queries sampled).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Appends the shortest round-trip decimal form of v. All persisted numbers
/// go through here so artifacts are byte-stable across platforms.
inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, static_cast<std::size_t>(res.ptr - buf));
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

/// Neumaier compensated accumulator. Summation order is fixed by the caller;
/// the compensation keeps per-query reductions stable when weights span
/// several orders of magnitude.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ultr

#endif  // ULTR_COMMON_HPP_
