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

#ifndef FASTKHIN_CF_CORE_HPP
#define FASTKHIN_CF_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fastkhin/log_real.hpp"

namespace fastkhin {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Digits (and psi values) stay exact integers up to 2^64; beyond that only
// their logarithm is carried.
inline constexpr double kExactLogLimit = 64.0 * std::numbers::ln2;

// Natural log of a positive big integer, accurate for any magnitude.
double log_of(const BigInt& x);

// Nearest double to a positive big integer (may be +inf).
double to_double(const BigInt& x);

// One partial quotient: an exact integer >= 1, or log a_n >= 0 in nats.
using PartialQuotient = std::variant<BigInt, LogReal>;

class PartialQuotients {
 public:
  PartialQuotients() = default;

  void push_exact(BigInt digit);
  void push_log(LogReal log_digit);
  void push_log(double log_digit) { push_log(LogReal::from_log(log_digit)); }

  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }
  const PartialQuotient& operator[](std::size_t i) const { return digits_[i]; }
  const std::vector<PartialQuotient>& digits() const noexcept { return digits_; }

  bool is_exact(std::size_t i) const { return std::holds_alternative<BigInt>(digits_[i]); }
  bool all_exact() const noexcept;
  const BigInt& exact(std::size_t i) const;
  // log a_i for either mode.
  double log_digit(std::size_t i) const;

  // True when the digits are the complete expansion of a rational; such a
  // sequence must be canonical (last digit > 1 unless it is [1]).
  bool complete() const noexcept { return complete_; }
  void mark_complete();

  // Digits 1..n as a new (prefix) sequence.
  PartialQuotients prefix(std::size_t n) const;

  friend bool operator==(const PartialQuotients&, const PartialQuotients&) = default;

 private:
  std::vector<PartialQuotient> digits_;
  bool complete_ = false;
};

PartialQuotients exact_digits(std::initializer_list<std::uint64_t> digits);

struct Convergent {
  BigInt p;
  BigInt q;
  std::size_t order = 0;
};

struct BasicInterval {
  std::size_t order = 0;
  bool exact_mode = false;
  // Exact mode only.
  Rational left;
  Rational right;
  Rational length;
  bool lower_bound_holds = false;  // (2^n prod a_k)^{-2} <= |I_n|
  bool upper_bound_holds = false;  // |I_n| <= (prod a_k)^{-2}
  // Always filled: [-2 sum log a_k - 2n log 2, -2 sum log a_k].
  double log_len_lo = 0.0;
  double log_len_hi = 0.0;
};

// Euclidean algorithm on p/q, truncated at max_n digits. p == 0 gives the
// empty expansion (T(0) = 0). Throws DomainError outside [0, 1).
PartialQuotients expand_rational(const BigInt& p, const BigInt& q, std::size_t max_n);

// Convergents p_1/q_1 ... p_n/q_n. Throws UnsupportedModeError on log digits.
std::vector<Convergent> convergents(const PartialQuotients& digits);

BasicInterval basic_interval(const PartialQuotients& digits);

// S_n = log a_1 + ... + log a_n. Throws RangeError when n > size.
double birkhoff_log_sum(const PartialQuotients& digits, std::size_t n);

// S_n(x) / n. Throws RangeError carrying the achieved depth when x has
// fewer than n partial quotients.
double khintchine_average(const Rational& x, std::size_t n);

// Uniform point of the grid {1, ..., 10^d - 1} / 10^d, determined by seed.
Rational sample_uniform_rational(std::size_t precision_digits, std::uint64_t seed);

// Seed for sample `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct KhintchineSummary {
  std::size_t samples = 0;
  std::size_t depth = 0;
  std::size_t precision = 0;
  std::uint64_t seed = 0;
  std::size_t truncated = 0;  // samples that could not reach `depth`
  double mean = 0.0;
  double standard_error = 0.0;
  // Relative frequency of digits 1..9 among the first `depth` quotients.
  std::vector<double> digit_frequency;
};

// Monte-Carlo Khintchine averages over `samples` grid rationals. Truncated
// samples are counted and left out of the mean. `threads` > 1 splits the
// samples; the result does not depend on it.
KhintchineSummary khintchine_monte_carlo(std::size_t samples, std::size_t depth,
                                         std::size_t precision, std::uint64_t seed,
                                         unsigned threads = 1);

}  // namespace fastkhin

#endif  // FASTKHIN_CF_CORE_HPP
