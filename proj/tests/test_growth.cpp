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
#include <random>
#include <thread>
#include <vector>

#include "fastkhin/errors.hpp"
#include "fastkhin/growth.hpp"

using namespace fastkhin;

namespace {

bool chain_holds(const GrowthInvariants& inv) {
  return inv.b_est >= 1.0 && inv.b_est <= inv.B_est && inv.B_est <= inv.beta_est;
}

GrowthFunction table_from(const std::vector<std::uint64_t>& v) {
  std::vector<BigInt> b(v.begin(), v.end());
  return GrowthFunction::table(std::move(b));
}

}  // namespace

TEST_CASE("eval examples") {
  const auto g = GrowthFunction::geometric(2);
  CHECK(g.exact(3) == BigInt(8));
  CHECK(g.eval(3).log() == doctest::Approx(std::log(8.0)));
  const auto t = GrowthFunction::table({5, 3, 4, 6, 7, 8, 9, 10});
  CHECK(t.exact(2) == BigInt(3));
  const auto d = GrowthFunction::double_exponential(1.0, 2.0);
  CHECK(d.eval(10).log() == doctest::Approx(100.0));
  CHECK_FALSE(d.exact(10).has_value());
}

TEST_CASE("eval errors") {
  const auto t = GrowthFunction::table({1, 2, 3});
  CHECK_THROWS_AS(t.eval(4), RangeError);
  CHECK_THROWS_AS(t.eval(0), DomainError);
  CHECK_THROWS_AS(GrowthFunction::table({1, 0, 3}), FamilyDefinitionError);
  const auto bad = GrowthFunction::custom("shrinking", [](std::size_t n) {
    return LogReal::from_log(1.0 - static_cast<double>(n));
  });
  CHECK_NOTHROW(bad.eval(1));
  CHECK_THROWS_AS(bad.eval(2), FamilyDefinitionError);
  CHECK_THROWS_AS(GrowthFunction::oscillating(3, 2, 5), DomainError);
  CHECK_THROWS_AS(GrowthFunction::geometric(1.0), DomainError);
  CHECK_THROWS_AS(invariants(GrowthFunction::geometric(2), 15), DomainError);
}

TEST_CASE("phi examples") {
  const auto t = GrowthFunction::table({5, 3, 4, 6, 7, 8, 9, 10, 11, 12});
  const auto p1 = phi(t, 1, 10);
  CHECK(p1.value.log() == doctest::Approx(std::log(3.0)));
  CHECK(p1.argmin == 2);
  CHECK_FALSE(p1.certified);
  CHECK(phi(t, 3, 10).value.log() == doctest::Approx(std::log(4.0)));
  const auto g = GrowthFunction::geometric(2);
  for (std::size_t k = 1; k <= 20; ++k) {
    const auto p = phi(g, k, 30);
    CHECK(p.value == g.eval(k));
    CHECK(p.certified);
  }
}

TEST_CASE("phi properties on random tables") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> v(60);
    std::uniform_int_distribution<std::uint64_t> u(1, 1000);
    for (auto& x : v) x = u(rng);
    const auto t = table_from(v);
    const auto seq = phi_sequence(t, 40);
    for (std::size_t n = 1; n <= 40; ++n) {
      // oracle: direct minimum over the rest of the table
      std::uint64_t m = v[n - 1];
      for (std::size_t k = n; k <= v.size(); ++k) m = std::min(m, v[k - 1]);
      CHECK(seq.log_phi[n - 1].log() == doctest::Approx(std::log(static_cast<double>(m))));
      CHECK(seq.log_phi[n - 1] <= t.eval(n));
      if (n > 1) CHECK(seq.log_phi[n - 2] <= seq.log_phi[n - 1]);
      if (n < 40 && !seq.equals_psi[n - 1]) CHECK(seq.log_phi[n - 1] == seq.log_phi[n]);
    }
    // every window reaching the end contains a point with phi = psi
    bool seen = false;
    for (std::size_t n = 40; n >= 1; --n) {
      seen = seen || seq.equals_psi[n - 1];
      if (n <= 40 && v[39] == *std::min_element(v.begin() + 39, v.end())) CHECK(seen);
    }
  }
}

TEST_CASE("geometric invariants are (r, r, r)") {
  for (double r : {2.0, 3.0, 5.0, 10.0}) {
    for (std::size_t N : {16, 17, 40, 100, 257}) {
      const auto inv = invariants(GrowthFunction::geometric(r), N);
      CHECK(inv.b_est == doctest::Approx(r).epsilon(1e-12));
      CHECK(inv.B_est == doctest::Approx(r).epsilon(1e-12));
      CHECK(inv.beta_est == doctest::Approx(r).epsilon(1e-12));
      CHECK(inv.window_lo == (N + 1) / 2);
      CHECK_FALSE(inv.subexponential);
    }
  }
}

TEST_CASE("non-integral bases: estimates of psi(n) = ceil(r^n)") {
  for (double r : {1.5, 7.25}) {
    for (std::size_t N : {16, 40, 100}) {
      // oracle over the window [ceil(N/2), N] in long double
      long double lo = 1e300L, hi = -1e300L, step = -1e300L;
      auto lpsi = [&](std::size_t n) {
        const long double v = std::pow(static_cast<long double>(r), static_cast<long double>(n));
        return v < 1.8e19L ? std::log(std::ceil(v)) : static_cast<long double>(n) * std::log(static_cast<long double>(r));
      };
      for (std::size_t n = (N + 1) / 2; n <= N; ++n) {
        lo = std::min(lo, lpsi(n) / n);
        hi = std::max(hi, lpsi(n) / n);
        if (n < N) step = std::max(step, lpsi(n + 1) - lpsi(n));
      }
      const auto inv = invariants(GrowthFunction::geometric(r), N);
      CHECK(inv.log_b == doctest::Approx(static_cast<double>(lo)).epsilon(1e-9));
      CHECK(inv.log_B == doctest::Approx(static_cast<double>(hi)).epsilon(1e-9));
      CHECK(inv.log_beta == doctest::Approx(static_cast<double>(std::max(step, hi))).epsilon(1e-9));
    }
  }
}

TEST_CASE("double-exponential invariants read as infinite") {
  const auto inv = invariants(GrowthFunction::double_exponential(1.0, 2.0), 60);
  CHECK(std::isinf(inv.b_est));
  CHECK(std::isinf(inv.B_est));
  CHECK(std::isinf(inv.beta_est));
  const auto declared = GrowthFunction::double_exponential(1.0, 2.0).declared();
  REQUIRE(declared);
  CHECK(std::isinf(declared->b));
}

TEST_CASE("slowly growing tables are flagged as b = 1") {
  std::vector<std::uint64_t> sq;
  for (std::uint64_t n = 1; n <= 120; ++n) sq.push_back(n * n);
  const auto inv = invariants(table_from(sq), 100);
  CHECK(inv.subexponential);
  CHECK_FALSE(inv.b_above_one());
  CHECK(chain_holds(inv));
}

TEST_CASE("oscillating family") {
  SUBCASE("degenerate (2, 2, 2) behaves like geometric(2)") {
    const auto inv = invariants(GrowthFunction::oscillating(2, 2, 2), 400);
    CHECK(inv.b_est == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(inv.B_est == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(inv.beta_est == doctest::Approx(2.0).epsilon(1e-9));
  }
  for (auto [b, B, beta] : {std::tuple{2.0, 3.0, 3.0}, std::tuple{2.0, 3.0, 5.0}}) {
    CAPTURE(beta);
    const auto psi = GrowthFunction::oscillating(b, B, beta);
    const auto inv = invariants(psi, 400);
    CHECK(std::fabs(inv.b_est / b - 1.0) <= 0.10);
    CHECK(std::fabs(inv.B_est / B - 1.0) <= 0.10);
    CHECK(std::fabs(inv.beta_est / beta - 1.0) <= 0.10);
    CHECK(chain_holds(inv));
    // shape: nondecreasing, steps bounded by beta, slope never above the B line by more than log(beta/B)
    for (std::size_t n = 1; n < 2000; ++n) {
      const double step = psi.eval(n + 1).log() - psi.eval(n).log();
      CHECK(step >= 0.0);
      CHECK(step <= std::log(beta) + 1e-9);
      CHECK(psi.eval(n).log() <= static_cast<double>(n) * std::log(B) + std::log(beta / B) + 1e-6);
      if (n >= 14) CHECK(psi.eval(n).log() >= static_cast<double>(n) * std::log(b) - 1e-6);
    }
  }
  const auto d = GrowthFunction::oscillating(2, 3, 5).declared();
  REQUIRE(d);
  CHECK(d->b == 2.0);
  CHECK(d->B == 3.0);
  CHECK(d->beta == 5.0);
}

TEST_CASE("invariant chain on randomized families") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    GrowthFunction psi = GrowthFunction::geometric(2);
    std::size_t N = 16 + static_cast<std::size_t>(u(rng) * 300);
    switch (k % 4) {
      case 0:
        psi = GrowthFunction::geometric(1.1 + 8.0 * u(rng));
        break;
      case 1: {
        const double b = 1.1 + 3.0 * u(rng), B = b * (1.0 + 2.0 * u(rng)),
                     beta = B * (1.0 + 3.0 * u(rng));
        psi = GrowthFunction::oscillating(b, B, beta);
        break;
      }
      case 2:
        psi = GrowthFunction::double_exponential(0.1 + u(rng), 1.2 + u(rng));
        N = std::min<std::size_t>(N, 80);
        break;
      default: {
        std::vector<std::uint64_t> v{1 + static_cast<std::uint64_t>(10 * u(rng))};
        for (std::size_t i = 1; i < 40; ++i)
          v.push_back(v.back() + static_cast<std::uint64_t>(u(rng) * static_cast<double>(v.back())));
        psi = table_from(v);
        N = 16 + static_cast<std::size_t>(u(rng) * 24);
      }
    }
    CAPTURE(psi.describe());
    CHECK(chain_holds(invariants(psi, N)));
  }
}

TEST_CASE("partial-sum ratios") {
  SUBCASE("geometric(3) against the closed form") {
    const auto d = psi_partial_sum_diagnostics(GrowthFunction::geometric(3), 30);
    for (std::size_t n = 1; n <= 30; ++n) {
      const double closed = (std::pow(3.0, n + 1.0) - 3.0) / (2.0 * std::pow(3.0, n));
      CHECK(d.ratio[n - 1] == doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK(d.tail_min == doctest::Approx(1.5).epsilon(1e-6));
  }
  SUBCASE("geometric(2)") {
    CHECK(psi_partial_sum_diagnostics(GrowthFunction::geometric(2), 40).tail_min ==
          doctest::Approx(2.0).epsilon(1e-5));
  }
  SUBCASE("exp(n^2): the last term dominates") {
    const auto d = psi_partial_sum_diagnostics(GrowthFunction::double_exponential(1.0, 2.0), 25);
    CHECK(d.tail_min == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t n = 2; n <= 25; ++n) CHECK(d.running_min[n - 1] <= d.running_min[n - 2]);
  }
}

TEST_CASE("superlinearity witness and envelope") {
  CHECK(check_superlinear(GrowthFunction::geometric(2), 64).certified);
  CHECK_FALSE(check_superlinear(GrowthFunction::table({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}), 16).certified);
  CHECK(monotone_envelope_ratio(GrowthFunction::geometric(3), 40) == doctest::Approx(1.0));
}

TEST_CASE("scaling by lambda") {
  const auto g = GrowthFunction::geometric(3);
  const auto s = g.scaled(5);
  CHECK(s.scale() == 5);
  CHECK(s.exact(4) == BigInt(405));
  CHECK(s.eval(30).log() == doctest::Approx(g.eval(30).log() + std::log(5.0)).epsilon(1e-14));
  REQUIRE(s.declared());
  CHECK(s.declared()->B == 3.0);
}

TEST_CASE("concurrent readers see one memo") {
  const auto psi = GrowthFunction::oscillating(2, 3, 5);
  std::vector<double> a(500), b(500);
  std::thread t1([&] { for (std::size_t n = 1; n <= 500; ++n) a[n - 1] = psi.eval(n).log(); });
  std::thread t2([&] { for (std::size_t n = 500; n >= 1; --n) b[n - 1] = psi.eval(n).log(); });
  t1.join();
  t2.join();
  CHECK(a == b);
}
