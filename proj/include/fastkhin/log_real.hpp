// Copyright 2026 The fastkhin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FASTKHIN_LOG_REAL_HPP
#define FASTKHIN_LOG_REAL_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>

#include "fastkhin/errors.hpp"

namespace fastkhin {

// A positive quantity held by its natural logarithm. The quantity may be
// astronomically large (e^{3^40}) or zero (log = -inf); the log itself is
// never NaN. Products are sums of logs, sums go through log-sum-exp.
class LogReal {
 public:
  constexpr LogReal() noexcept = default;  // zero

  static LogReal from_log(double log_value) {
    if (std::isnan(log_value)) throw DomainError("LogReal: NaN log value");
    LogReal r;
    r.log_ = log_value;
    return r;
  }

  static LogReal from_value(double value) {
    if (std::isnan(value) || value < 0.0)
      throw DomainError("LogReal: quantity must be >= 0");
    return from_log(std::log(value));
  }

  static constexpr LogReal zero() noexcept { return LogReal{}; }
  static LogReal one() noexcept { return from_log_unchecked(0.0); }
  static LogReal infinity() noexcept {
    return from_log_unchecked(std::numeric_limits<double>::infinity());
  }

  constexpr double log() const noexcept { return log_; }
  double value() const noexcept { return std::exp(log_); }

  bool is_zero() const noexcept { return log_ == -kInf; }
  bool is_infinite() const noexcept { return log_ == kInf; }

  LogReal& operator+=(LogReal rhs) noexcept {
    if (rhs.log_ == -kInf) return *this;
    if (log_ == -kInf || rhs.log_ == kInf || log_ == kInf) {
      log_ = std::max(log_, rhs.log_);
      return *this;
    }
    const double hi = std::max(log_, rhs.log_);
    const double lo = std::min(log_, rhs.log_);
    log_ = hi + std::log1p(std::exp(lo - hi));
    return *this;
  }

  LogReal& operator*=(LogReal rhs) {
    if ((log_ == -kInf && rhs.log_ == kInf) || (log_ == kInf && rhs.log_ == -kInf))
      throw DomainError("LogReal: 0 * inf");
    log_ += rhs.log_;
    return *this;
  }

  LogReal& operator/=(LogReal rhs) {
    if (rhs.log_ == -kInf) throw DomainError("LogReal: division by zero");
    if (log_ == rhs.log_ && std::isinf(log_)) throw DomainError("LogReal: inf / inf");
    log_ -= rhs.log_;
    return *this;
  }

  friend LogReal operator+(LogReal a, LogReal b) noexcept { return a += b; }
  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
  friend LogReal operator/(LogReal a, LogReal b) { return a /= b; }

  // Quantity raised to a real power.
  LogReal pow(double exponent) const {
    if (exponent == 0.0) return one();
    return from_log(log_ * exponent);
  }

  friend constexpr bool operator==(LogReal a, LogReal b) noexcept { return a.log_ == b.log_; }
  friend constexpr auto operator<=>(LogReal a, LogReal b) noexcept {
    // never NaN, so the order is total
    return a.log_ < b.log_   ? std::strong_ordering::less
           : a.log_ > b.log_ ? std::strong_ordering::greater
                             : std::strong_ordering::equal;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  static LogReal from_log_unchecked(double v) noexcept {
    LogReal r;
    r.log_ = v;
    return r;
  }

  double log_ = -kInf;
};

}  // namespace fastkhin

#endif  // FASTKHIN_LOG_REAL_HPP
