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

#include "fastkhin/cf_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace fastkhin {

namespace mp = boost::multiprecision;

double log_of(const BigInt& x) {
  if (x <= 0) throw DomainError("log_of: non-positive integer");
  const std::size_t bits = mp::msb(x);
  if (bits < 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

double to_double(const BigInt& x) { return x.convert_to<double>(); }

void PartialQuotients::push_exact(BigInt digit) {
  if (digit < 1) throw DomainError("partial quotient must be >= 1");
  digits_.emplace_back(std::move(digit));
  complete_ = false;
}

void PartialQuotients::push_log(LogReal log_digit) {
  if (log_digit.log() < 0.0) throw DomainError("log partial quotient must be >= 0");
  digits_.emplace_back(log_digit);
  complete_ = false;
}

bool PartialQuotients::all_exact() const noexcept {
  return std::all_of(digits_.begin(), digits_.end(),
                     [](const PartialQuotient& d) { return std::holds_alternative<BigInt>(d); });
}

const BigInt& PartialQuotients::exact(std::size_t i) const {
  if (const auto* v = std::get_if<BigInt>(&digits_.at(i))) return *v;
  throw UnsupportedModeError("partial quotient " + std::to_string(i + 1) + " is log-mode");
}

double PartialQuotients::log_digit(std::size_t i) const {
  const auto& d = digits_.at(i);
  if (const auto* v = std::get_if<BigInt>(&d)) return *v == 1 ? 0.0 : log_of(*v);
  return std::get<LogReal>(d).log();
}

void PartialQuotients::mark_complete() {
  if (!all_exact()) throw UnsupportedModeError("only exact expansions can be complete");
  if (digits_.size() > 1 && exact(digits_.size() - 1) == 1)
    throw DomainError("non-canonical rational expansion (trailing 1)");
  complete_ = true;
}

PartialQuotients PartialQuotients::prefix(std::size_t n) const {
  if (n > digits_.size()) throw RangeError("prefix longer than expansion", digits_.size());
  PartialQuotients out;
  out.digits_.assign(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(n));
  out.complete_ = complete_ && n == digits_.size();
  return out;
}

PartialQuotients exact_digits(std::initializer_list<std::uint64_t> digits) {
  PartialQuotients out;
  for (auto d : digits) out.push_exact(BigInt(d));
  return out;
}

PartialQuotients expand_rational(const BigInt& p, const BigInt& q, std::size_t max_n) {
  if (max_n == 0) throw DomainError("expand_rational: max_n must be >= 1");
  if (q <= 0 || p < 0 || p >= q) throw DomainError("expand_rational: p/q must lie in [0, 1)");
  PartialQuotients out;
  if (p == 0) return out;
  // x = num/den; a = floor(den/num); T(x) = (den mod num)/num.
  BigInt num = p;
  BigInt den = q;
  while (num != 0 && out.size() < max_n) {
    BigInt a;
    BigInt r;
    mp::divide_qr(den, num, a, r);
    out.push_exact(std::move(a));
    den = std::move(num);
    num = std::move(r);
  }
  if (num == 0) out.mark_complete();
  return out;
}

std::vector<Convergent> convergents(const PartialQuotients& digits) {
  std::vector<Convergent> out;
  out.reserve(digits.size());
  BigInt p_prev = 1, p = 0;  // p_{-1}, p_0
  BigInt q_prev = 0, q = 1;  // q_{-1}, q_0
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const BigInt& a = digits.exact(i);
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({p, q, i + 1});
  }
  return out;
}

BasicInterval basic_interval(const PartialQuotients& digits) {
  if (digits.empty()) throw DomainError("basic_interval: empty digit string");
  BasicInterval iv;
  iv.order = digits.size();
  const double n = static_cast<double>(iv.order);
  const double s = birkhoff_log_sum(digits, digits.size());
  iv.log_len_hi = -2.0 * s;
  iv.log_len_lo = -2.0 * s - 2.0 * n * std::numbers::ln2;
  if (!digits.all_exact()) return iv;

  iv.exact_mode = true;
  const auto conv = convergents(digits);
  const BigInt& pn = conv.back().p;
  const BigInt& qn = conv.back().q;
  const BigInt pn1 = conv.size() > 1 ? conv[conv.size() - 2].p : BigInt(0);
  const BigInt qn1 = conv.size() > 1 ? conv[conv.size() - 2].q : BigInt(1);
  const Rational a(pn, qn);
  const Rational b(pn + pn1, qn + qn1);
  iv.left = std::min(a, b);
  iv.right = std::max(a, b);
  const BigInt denom = qn * (qn + qn1);
  iv.length = Rational(1, denom);

  BigInt prod = 1;
  for (std::size_t i = 0; i < digits.size(); ++i) prod *= digits.exact(i);
  const BigInt upper_den = prod * prod;                  // |I_n| <= 1/upper_den
  const BigInt lower_den = (prod << iv.order) * (prod << iv.order);  // |I_n| >= 1/lower_den
  iv.upper_bound_holds = denom >= upper_den;
  iv.lower_bound_holds = denom <= lower_den;
  return iv;
}

double birkhoff_log_sum(const PartialQuotients& digits, std::size_t n) {
  if (n > digits.size())
    throw RangeError("birkhoff_log_sum: n exceeds available digits", digits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += digits.log_digit(i);
  return s;
}

double khintchine_average(const Rational& x, std::size_t n) {
  if (n == 0) throw DomainError("khintchine_average: n must be >= 1");
  const BigInt p = mp::numerator(x);
  const BigInt q = mp::denominator(x);
  if (p <= 0 || p >= q) throw DomainError("khintchine_average: x must lie in (0, 1)");
  const auto digits = expand_rational(p, q, n);
  if (digits.size() < n)
    throw RangeError("khintchine_average: x has only " + std::to_string(digits.size()) +
                         " partial quotients",
                     digits.size());
  return birkhoff_log_sum(digits, n) / static_cast<double>(n);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Rational sample_uniform_rational(std::size_t precision_digits, std::uint64_t seed) {
  if (precision_digits == 0) throw DomainError("precision_digits must be >= 1");
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> digit(0, 9);
  BigInt k = 0;
  while (k == 0) {
    for (std::size_t i = 0; i < precision_digits; ++i) k = k * 10 + digit(engine);
  }
  return Rational(k, mp::pow(BigInt(10), static_cast<unsigned>(precision_digits)));
}

namespace {

struct SampleResult {
  bool truncated = false;
  double average = 0.0;
  std::array<std::size_t, 9> counts{};
  std::size_t quotients = 0;
};

SampleResult run_sample(std::size_t index, std::size_t depth, std::size_t precision,
                        std::uint64_t seed) {
  const Rational x = sample_uniform_rational(precision, derive_seed(seed, index));
  const auto digits = expand_rational(mp::numerator(x), mp::denominator(x), depth);
  SampleResult r;
  r.quotients = digits.size();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const BigInt& a = digits.exact(i);
    if (a <= 9) ++r.counts[a.convert_to<std::size_t>() - 1];
  }
  if (digits.size() < depth) {
    r.truncated = true;
  } else {
    r.average = birkhoff_log_sum(digits, depth) / static_cast<double>(depth);
  }
  return r;
}

}  // namespace

KhintchineSummary khintchine_monte_carlo(std::size_t samples, std::size_t depth,
                                         std::size_t precision, std::uint64_t seed,
                                         unsigned threads) {
  if (samples == 0) throw DomainError("samples must be >= 1");
  if (depth == 0) throw DomainError("depth must be >= 1");
  std::vector<SampleResult> results(samples);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples)));
  if (threads == 1) {
    for (std::size_t i = 0; i < samples; ++i) results[i] = run_sample(i, depth, precision, seed);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < samples; i += threads)
          results[i] = run_sample(i, depth, precision, seed);
      });
    }
    for (auto& th : pool) th.join();
  }

  KhintchineSummary s;
  s.samples = samples;
  s.depth = depth;
  s.precision = precision;
  s.seed = seed;
  std::array<std::size_t, 9> counts{};
  std::size_t total = 0;
  double sum = 0.0;
  for (const auto& r : results) {
    for (std::size_t d = 0; d < 9; ++d) counts[d] += r.counts[d];
    total += r.quotients;
    if (r.truncated) {
      ++s.truncated;
    } else {
      sum += r.average;
    }
  }
  const std::size_t used = samples - s.truncated;
  if (used > 0) {
    s.mean = sum / static_cast<double>(used);
    double ss = 0.0;
    for (const auto& r : results)
      if (!r.truncated) ss += (r.average - s.mean) * (r.average - s.mean);
    s.standard_error =
        used > 1 ? std::sqrt(ss / static_cast<double>(used - 1) / static_cast<double>(used)) : 0.0;
  }
  s.digit_frequency.resize(9);
  for (std::size_t d = 0; d < 9; ++d)
    s.digit_frequency[d] = total ? static_cast<double>(counts[d]) / static_cast<double>(total) : 0.0;
  return s;
}

}  // namespace fastkhin
