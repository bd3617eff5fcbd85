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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fastkhin/constructions.hpp"

namespace fastkhin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double resolve_B(const GrowthFunction& psi, std::size_t N, const LowerOptions& options) {
  double B;
  if (options.B) {
    B = *options.B;
  } else if (auto d = psi.declared()) {
    B = d->B;
  } else {
    const auto inv = invariants(psi, N, options.invariant_options);
    if (!inv.B_above_one())
      throw HypothesisError(psi.describe() + ": B estimate is not above 1; b, B in (1, inf] required");
    B = inv.B_est;
  }
  if (!(B > 1.0)) throw HypothesisError(psi.describe() + ": B must be > 1");
  if (std::isinf(B)) throw HypothesisError(psi.describe() + ": B = inf is not constructed");
  return B;
}

// Smallest enlargement of [lo, hi] (logs) containing an integer >= 1.
// Returns false when the window already contains one.
bool widen_to_integer(LogWindow& w) {
  const long double lo = std::exp(static_cast<long double>(w.lo));
  const long double hi = std::exp(static_cast<long double>(w.hi));
  const long double up = std::ceil(lo);
  if (up <= hi) return false;
  const long double down = std::floor(lo);
  if (down >= 1.0L && lo - down < up - hi) {
    w.lo = static_cast<double>(std::log(down));
  } else {
    w.hi = static_cast<double>(std::log(up));
  }
  return true;
}

}  // namespace

LowerConstruction build_lower(const GrowthFunction& psi, double epsilon, std::size_t N,
                              const LowerOptions& options) {
  if (N < 2) throw DomainError("build_lower: horizon must be >= 2");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw DomainError("build_lower: epsilon must lie in (0, 1)");
  LowerConstruction lc;
  lc.B = resolve_B(psi, N, options);
  lc.epsilon = epsilon;
  lc.horizon = N;
  const double base = lc.B + epsilon;
  const double log_base = std::log(base);
  const auto last = psi.last_index();
  const std::size_t count = N + 1;
  if (last && *last < count)
    throw RangeError("build_lower: table shorter than horizon + 1", *last);

  // log of psi(n) base^{i-n} is h(n) + i log base with h(n) = log psi(n) - n log base,
  // so every sup is a suffix max of h. All indices share one search end: the
  // first point past search_factor * (N + 1) (or the table end) after which
  // dominated_run consecutive terms fall below the running max. A common end
  // keeps the sups nested, hence log A_{i+1} <= (B + eps) log A_i exactly.
  std::vector<double> h;
  auto term = [&](std::size_t n) {
    return psi.eval(n).log() - static_cast<double>(n) * log_base;
  };
  const std::size_t floor_end = last ? *last : std::max(count, options.search_factor * count);
  h.reserve(floor_end);
  double tail_best = -kInf;
  for (std::size_t n = 1; n <= floor_end; ++n) {
    h.push_back(term(n));
    if (n >= count) tail_best = std::max(tail_best, h.back());
  }
  if (last) {
    lc.sup_certified = false;
  } else {
    constexpr std::size_t kMaxSearch = std::size_t{1} << 22;
    std::size_t run = 0;
    while (run < options.dominated_run) {
      if (h.size() >= kMaxSearch) {
        lc.sup_certified = false;
        break;
      }
      h.push_back(term(h.size() + 1));
      if (h.back() < tail_best) {
        ++run;
      } else {
        tail_best = h.back();
        run = 0;
      }
    }
  }
  // Suffix max scanned backwards; >= moves ties to the smaller index.
  std::vector<std::size_t> arg(count);
  {
    double best = -kInf;
    std::size_t best_n = h.size();
    for (std::size_t n = h.size(); n >= 1; --n) {
      if (h[n - 1] >= best) {
        best = h[n - 1];
        best_n = n;
      }
      if (n <= count) arg[n - 1] = best_n;
    }
  }
  lc.log_A.reserve(count);
  lc.t.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    const std::size_t t = arg[i - 1];
    const double value = psi.value(t) * std::pow(base, -static_cast<double>(t - i));
    lc.log_A.push_back(LogReal::from_log(value));
    lc.t.push_back(t);
  }
  for (std::size_t i = 0; i < count; ++i)
    if (lc.ell.empty() || lc.t[i] != lc.ell.back()) lc.ell.push_back(lc.t[i]);

  double sum = 0.0;
  lc.Z_est = kInf;
  for (std::size_t n = 1; n <= N; ++n) {
    sum += lc.log_A[n - 1].log();
    if (n >= (N + 1) / 2) lc.Z_est = std::min(lc.Z_est, sum / psi.value(n));
  }
  if (!(lc.Z_est <= options.z_cap)) {
    std::ostringstream os;
    os << psi.describe() << ": Z estimate " << lc.Z_est << " exceeds the finiteness cap "
       << options.z_cap << " (Z must be finite)";
    throw ConstructionError(os.str());
  }
  lc.partial_sum_tail_min = psi_partial_sum_diagnostics(psi, N).tail_min;

  const double log_floor = std::log(options.eps_floor);
  const double log_half = -std::numbers::ln2;
  lc.log_eps.reserve(count);
  lc.windows.reserve(count);
  lc.clipped.assign(count, false);
  lc.widened.assign(count, false);
  for (std::size_t i = 1; i <= count; ++i) {
    const double center = lc.log_A[i - 1].log() / lc.Z_est;
    double log_eps = std::max(-center / 2.0, log_floor);
    if (log_eps > log_half) {
      log_eps = log_half;
      lc.clipped[i - 1] = true;
    }
    const double eps = std::exp(log_eps);
    LogWindow w{center + std::log1p(-eps), center + std::log1p(eps), false};
    if (w.lo < 0.0) w.lo = 0.0;  // digits are >= 1
    if (w.hi <= kExactLogLimit) lc.widened[i - 1] = widen_to_integer(w);
    lc.log_eps.push_back(log_eps);
    lc.windows.push_back(w);
  }
  lc.i0 = 1;
  for (std::size_t i = count; i >= 1; --i) {
    if (lc.clipped[i - 1] || lc.widened[i - 1]) {
      lc.i0 = i + 1;
      break;
    }
  }
  return lc;
}

LowerDiagnostics verify_lower(const LowerConstruction& lc, const GrowthFunction& psi,
                              const LowerTolerances& tol) {
  LowerDiagnostics d;
  const std::size_t N = lc.horizon;
  const double base = lc.B + lc.epsilon;
  auto leq = [&](double a, double b) { return a <= b + tol.relative * std::max(1.0, std::fabs(b)); };

  d.growth_ok = true;
  d.floor_ok = true;
  for (std::size_t i = 1; i <= N + 1; ++i) {
    if (!leq(psi.value(i), lc.log_A[i - 1].log())) d.floor_ok = false;
    if (i <= N && !leq(lc.log_A[i].log(), base * lc.log_A[i - 1].log())) d.growth_ok = false;
  }

  d.plateau_ok = true;
  for (std::size_t i = 1; i <= N + 1; ++i) {
    const std::size_t ti = lc.t[i - 1];
    if (ti < i) d.plateau_ok = false;
    for (std::size_t k = i + 1; k <= std::min(ti, N + 1); ++k)
      if (lc.t[k - 1] != ti) d.plateau_ok = false;
  }

  d.ell_ok = true;
  d.block_bound_ok = true;
  const double factor = base / (base - 1.0);
  std::size_t prev = 0;
  for (std::size_t l : lc.ell) {
    if (l > N + 1) break;  // incomplete block
    const double p = psi.value(l);
    if (std::fabs(lc.log_A[l - 1].log() - p) > tol.relative * p) d.ell_ok = false;
    double block = 0.0;
    for (std::size_t k = prev + 1; k <= l; ++k) block += lc.log_A[k - 1].log();
    const double ratio = block / (factor * p);
    d.block_ratio_max = std::max(d.block_ratio_max, ratio);
    if (!leq(ratio, 1.0)) d.block_bound_ok = false;
    prev = l;
  }

  double sum = 0.0;
  d.membership_ratio_min = std::numeric_limits<double>::infinity();
  double pert_plus = 0.0, pert_minus = 0.0, sum_log_2eps = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    sum += lc.log_A[n - 1].log();
    const double eps = std::exp(lc.log_eps[n - 1]);
    pert_plus += std::log1p(eps);
    pert_minus += std::log1p(-eps);
    sum_log_2eps += std::numbers::ln2 + lc.log_eps[n - 1];
    if (n >= (N + 1) / 2)
      d.membership_ratio_min = std::min(d.membership_ratio_min, sum / lc.Z_est / psi.value(n));
  }
  d.perturbation_ratio = std::max(std::fabs(pert_plus), std::fabs(pert_minus)) / psi.value(N);
  d.eps_log_ratio = std::fabs(sum_log_2eps) / lc.log_A[N].log();
  d.z_ok = lc.Z_est >= 1.0 - tol.relative;
  d.membership_ok = std::fabs(d.membership_ratio_min - 1.0) <= tol.membership;
  d.i0 = lc.i0;
  d.pass = d.growth_ok && d.floor_ok && d.block_bound_ok && d.plateau_ok && d.ell_ok && d.z_ok &&
           d.membership_ok;
  return d;
}

}  // namespace fastkhin
