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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fastkhin/cf_core.hpp"
#include "fastkhin/errors.hpp"

using namespace fastkhin;

namespace {

std::vector<std::uint64_t> as_u64(const PartialQuotients& d) {
  std::vector<std::uint64_t> v;
  for (std::size_t i = 0; i < d.size(); ++i) v.push_back(d.exact(i).convert_to<std::uint64_t>());
  return v;
}

PartialQuotients from_vector(const std::vector<std::uint64_t>& v) {
  PartialQuotients d;
  for (auto x : v) d.push_exact(BigInt(x));
  return d;
}

// [a_1, ..., a_n] evaluated back to front.
Rational fold(const std::vector<std::uint64_t>& v) {
  Rational x = 0;
  for (auto it = v.rbegin(); it != v.rend(); ++it) x = Rational(1) / (Rational(BigInt(*it)) + x);
  return x;
}

// q_n, q_{n-1} by the recurrence on plain integers.
std::pair<std::int64_t, std::int64_t> denominators(const std::vector<std::uint64_t>& v) {
  std::int64_t q_prev = 0, q = 1;
  for (auto a : v) {
    const std::int64_t next = static_cast<std::int64_t>(a) * q + q_prev;
    q_prev = q;
    q = next;
  }
  return {q, q_prev};
}

}  // namespace

TEST_CASE("expand_rational examples") {
  CHECK(as_u64(expand_rational(2, 5, 10)) == std::vector<std::uint64_t>{2, 2});
  CHECK(as_u64(expand_rational(1, 3, 10)) == std::vector<std::uint64_t>{3});
  CHECK(as_u64(expand_rational(16, 113, 10)) == std::vector<std::uint64_t>{7, 16});
  CHECK(expand_rational(2, 5, 10).complete());
  CHECK(as_u64(expand_rational(4, 10, 10)) == std::vector<std::uint64_t>{2, 2});
}

TEST_CASE("expand_rational edge cases") {
  CHECK(expand_rational(0, 7, 5).empty());
  CHECK_THROWS_AS(expand_rational(7, 5, 10), DomainError);
  CHECK_THROWS_AS(expand_rational(5, 5, 10), DomainError);
  CHECK_THROWS_AS(expand_rational(1, 0, 10), DomainError);
  // 13/21 = [1, 1, 1, 1, 1, 2]: truncation keeps the prefix and is not complete.
  const auto t = expand_rational(13, 21, 3);
  CHECK(as_u64(t) == std::vector<std::uint64_t>{1, 1, 1});
  CHECK_FALSE(t.complete());
  CHECK(as_u64(expand_rational(13, 21, 10)) == std::vector<std::uint64_t>{1, 1, 1, 1, 1, 2});
}

TEST_CASE("canonical form of complete expansions") {
  PartialQuotients d = exact_digits({2, 1});
  CHECK_THROWS(d.mark_complete());
  PartialQuotients one = exact_digits({1});
  CHECK_NOTHROW(one.mark_complete());
  CHECK_THROWS_AS(exact_digits({2, 0}), DomainError);
}

TEST_CASE("convergents examples") {
  auto last = [](std::initializer_list<std::uint64_t> v) { return convergents(exact_digits(v)).back(); };
  CHECK(last({1, 1, 1}).p == 2);
  CHECK(last({1, 1, 1}).q == 3);
  CHECK(last({2, 2}).p == 2);
  CHECK(last({2, 2}).q == 5);
  CHECK(last({5}).p == 1);
  CHECK(last({5}).q == 5);
  PartialQuotients mixed = exact_digits({2});
  mixed.push_log(40.0);
  CHECK_THROWS_AS(convergents(mixed), UnsupportedModeError);
}

TEST_CASE("basic_interval examples") {
  const auto one = basic_interval(exact_digits({1}));
  CHECK(one.length == Rational(1, 2));
  CHECK(one.lower_bound_holds);
  CHECK(one.upper_bound_holds);
  const auto two = basic_interval(exact_digits({2, 2}));
  CHECK(two.length == Rational(1, 35));
  CHECK(two.lower_bound_holds);
  CHECK(two.upper_bound_holds);
  CHECK(Rational(1, 256) <= two.length);
  CHECK(two.length <= Rational(1, 16));

  PartialQuotients logs;
  for (double v : {10.0, 20.0, 30.0}) logs.push_log(v);
  const auto b = basic_interval(logs);
  CHECK_FALSE(b.exact_mode);
  CHECK(b.log_len_hi == doctest::Approx(-120.0));
  CHECK(b.log_len_lo == doctest::Approx(-120.0 - 6.0 * std::numbers::ln2));
}

TEST_CASE("interval bounds, endpoints and brackets over all short strings") {
  std::size_t count = 0;
  std::vector<std::uint64_t> v;
  auto visit = [&](auto&& self, std::size_t depth) -> void {
    if (depth > 0) {
      ++count;
      const auto I = basic_interval(from_vector(v));
      const auto [q, q_prev] = denominators(v);
      REQUIRE(I.length == Rational(1, q * (q + q_prev)));
      CHECK(I.lower_bound_holds);
      CHECK(I.upper_bound_holds);
      CHECK(I.right - I.left == I.length);
      // the interval contains every x whose expansion starts with v
      const Rational x = fold(v);
      CHECK(I.left <= x);
      CHECK(x <= I.right);
      const double exact_log = std::log(static_cast<double>(q)) + std::log(static_cast<double>(q + q_prev));
      CHECK(I.log_len_lo <= -exact_log + 1e-12);
      CHECK(-exact_log <= I.log_len_hi + 1e-12);
      CHECK(I.log_len_hi - I.log_len_lo <= 2.0 * static_cast<double>(depth) * std::numbers::ln2 + 1e-12);
    }
    if (depth == 5) return;
    for (std::uint64_t a = 1; a <= 5; ++a) {
      v.push_back(a);
      self(self, depth + 1);
      v.pop_back();
    }
  };
  visit(visit, 0);
  CHECK(count == 3905);
}

TEST_CASE("round trip and determinant identity on random canonical strings") {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::uint64_t> digit(1, 50), len(1, 20);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::uint64_t> v(len(rng));
    for (auto& a : v) a = digit(rng);
    if (v.back() == 1) v.back() = 2;  // canonical; also keeps x = [1] = 1 out
    const Rational x = fold(v);
    const auto d = expand_rational(numerator(x), denominator(x), 64);
    REQUIRE(as_u64(d) == v);
    const auto c = convergents(d);
    CHECK(Rational(c.back().p, c.back().q) == x);
    BigInt p_prev = 0, q_prev = 1;  // p_0, q_0
    for (std::size_t n = 0; n < c.size(); ++n) {
      const BigInt det = c[n].p * q_prev - p_prev * c[n].q;
      CHECK(det == (n % 2 == 0 ? 1 : -1));
      if (n >= 1) CHECK(c[n].q > q_prev);
      p_prev = c[n].p;
      q_prev = c[n].q;
    }
  }
}

TEST_CASE("birkhoff_log_sum") {
  CHECK(birkhoff_log_sum(exact_digits({1, 1, 1}), 3) == 0.0);
  CHECK(birkhoff_log_sum(exact_digits({2, 2}), 2) == doctest::Approx(1.386294).epsilon(1e-6));
  PartialQuotients logs;
  logs.push_log(10.0);
  logs.push_log(20.0);
  CHECK(birkhoff_log_sum(logs, 2) == doctest::Approx(30.0));
  CHECK_THROWS_AS(birkhoff_log_sum(logs, 3), RangeError);

  // additivity over a concatenation
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> digit(1, 1000);
  PartialQuotients d;
  for (int i = 0; i < 30; ++i) d.push_exact(BigInt(digit(rng)));
  for (std::size_t m = 0; m <= 30; ++m) {
    double tail = 0.0;
    for (std::size_t i = m; i < 30; ++i) tail += d.log_digit(i);
    CHECK(birkhoff_log_sum(d, 30) == doctest::Approx(birkhoff_log_sum(d, m) + tail).epsilon(1e-13));
  }
}

TEST_CASE("exact digits beyond 2^64 keep accurate logs") {
  const BigInt big = BigInt(1) << 3000;
  CHECK(log_of(big) == doctest::Approx(3000.0 * std::numbers::ln2).epsilon(1e-14));
  CHECK(log_of(BigInt(12345)) == doctest::Approx(std::log(12345.0)));
}

TEST_CASE("khintchine_average") {
  CHECK(khintchine_average(Rational(2, 5), 2) == doctest::Approx(std::numbers::ln2));
  std::vector<std::uint64_t> ones(20, 1);
  ones.push_back(2);
  CHECK(khintchine_average(fold(ones), 20) == 0.0);
  try {
    khintchine_average(Rational(2, 5), 3);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.achieved() == 2);
  }
}

TEST_CASE("sample_uniform_rational") {
  CHECK(sample_uniform_rational(3, 42) == sample_uniform_rational(3, 42));
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Rational x = sample_uniform_rational(1, s);
    CHECK(x > 0);
    CHECK(x < 1);
    CHECK((x * 10).convert_to<double>() == std::round((x * 10).convert_to<double>()));
  }
  const Rational y = sample_uniform_rational(300, 9);
  CHECK(denominator(y) <= pow(BigInt(10), 300));
}

TEST_CASE("Monte-Carlo results do not depend on the thread count") {
  const auto a = khintchine_monte_carlo(60, 40, 120, 17, 1);
  const auto b = khintchine_monte_carlo(60, 40, 120, 17, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.digit_frequency == b.digit_frequency);
  CHECK(a.truncated == b.truncated);
}

TEST_CASE("truncated samples are counted") {
  const auto s = khintchine_monte_carlo(20, 100, 5, 1);
  CHECK(s.truncated == 20);
}

TEST_CASE("digit-1 frequency follows the Gauss measure") {
  // Oracle: Gauss measure of [1/2, 1] by composite Simpson on dx / ((1 + x) log 2).
  const int m = 2000;
  const double a = 0.5, b = 1.0, h = (b - a) / m;
  auto f = [](double x) { return 1.0 / ((1.0 + x) * std::numbers::ln2); };
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  const double oracle = s * h / 3.0;
  CHECK(oracle == doctest::Approx(0.41503749927884).epsilon(1e-12));  // frozen: log2(4/3)

  const auto summary = khintchine_monte_carlo(10000, 50, 300, 2026);
  CHECK(summary.truncated == 0);
  CHECK(std::fabs(summary.digit_frequency[0] / 0.41503749927884 - 1.0) <= 0.02);
}
