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

#include "fastkhin/constructions.hpp"

namespace fastkhin {

namespace {

double resolve_b(const GrowthFunction& psi, std::size_t N, const UpperOptions& options) {
  double b;
  if (options.b) {
    b = *options.b;
  } else if (auto d = psi.declared()) {
    b = d->b;
  } else {
    const auto inv = invariants(psi, N, options.invariant_options);
    if (!inv.b_above_one())
      throw HypothesisError(psi.describe() + ": b estimate is not above 1; b, B in (1, inf] required");
    b = inv.b_est;
  }
  if (!(b > 1.0)) throw HypothesisError(psi.describe() + ": b must be > 1");
  if (std::isinf(b)) throw HypothesisError(psi.describe() + ": b = inf is not constructed");
  return b;
}

}  // namespace

std::vector<std::size_t> UpperConstruction::first_branch_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < first_branch.size(); ++i)
    if (first_branch[i]) out.push_back(i + 1);
  return out;
}

std::vector<LogWindow> UpperConstruction::windows() const {
  std::vector<LogWindow> w;
  w.reserve(log_s.size());
  for (const auto& s : log_s) {
    const double lo = s.log();
    // Past 2^53 nats log 2 vanishes against log s; keep the window nonempty.
    const double hi = std::max(lo + std::numbers::ln2, std::nextafter(lo, std::numeric_limits<double>::infinity()));
    w.push_back({lo, hi, true});
  }
  return w;
}

UpperConstruction build_upper(const GrowthFunction& psi, double epsilon, std::size_t N,
                              const UpperOptions& options) {
  if (N < 2) throw DomainError("build_upper: horizon must be >= 2");
  UpperConstruction uc;
  uc.b = resolve_b(psi, N, options);
  if (!(epsilon > 0.0) || !(epsilon < (uc.b - 1.0) / 2.0))
    throw DomainError("build_upper: epsilon must lie in (0, (b-1)/2)");
  uc.epsilon = epsilon;
  uc.horizon = N;

  const auto seq = phi_sequence(psi, N);
  uc.phi_certified = seq.certified;
  uc.phi.resize(N);
  for (std::size_t n = 1; n <= N; ++n) uc.phi[n - 1] = psi.value(seq.argmin[n - 1]);
  uc.phi_equals_psi = seq.equals_psi;

  const double growth = uc.b - 1.0 + epsilon;
  uc.log_c.reserve(N);
  uc.first_branch.reserve(N);
  double sum = 0.0;  // sum_{k<n} L_k = log prod c_k
  for (std::size_t n = 1; n <= N; ++n) {
    const double phi_n = uc.phi[n - 1];
    const double first = std::max(0.0, phi_n - sum);
    const double second = growth * sum;
    if (n == 1 || first <= second) {
      uc.log_c.push_back(LogReal::from_log(first));
      uc.first_branch.push_back(true);
      sum = phi_n;  // the product now equals e^{phi(n)} exactly
    } else {
      uc.log_c.push_back(LogReal::from_log(second));
      uc.first_branch.push_back(false);
      sum += second;
    }
  }

  // n_k: first index from which psi(n)/n >= k^2 on the whole sampled tail.
  std::vector<double> suffix_min(N + 1, std::numeric_limits<double>::infinity());
  for (std::size_t n = N; n >= 1; --n)
    suffix_min[n - 1] = std::min(suffix_min[n], psi.eval(n).log() - std::log(static_cast<double>(n)));
  std::size_t from = 1;
  for (std::uint64_t k = 1;; ++k) {
    const double need = 2.0 * std::log(static_cast<double>(k));
    std::size_t nk = from;
    while (nk <= N && suffix_min[nk - 1] < need) ++nk;
    if (nk > N) break;
    uc.staircase.push_back(nk);
    from = nk + 1;
  }
  uc.alpha.assign(N, 2);
  for (std::size_t k = 0; k < uc.staircase.size(); ++k) {
    const std::size_t end = k + 1 < uc.staircase.size() ? uc.staircase[k + 1] : N + 1;
    for (std::size_t n = uc.staircase[k]; n < end; ++n) uc.alpha[n - 1] = k + 2;
  }

  uc.log_s.reserve(N);
  for (std::size_t n = 1; n <= N; ++n)
    uc.log_s.push_back(uc.log_c[n - 1] + LogReal::from_value(static_cast<double>(uc.alpha[n - 1])));
  return uc;
}

UpperDiagnostics verify_upper(const UpperConstruction& uc, const GrowthFunction& psi,
                              const UpperTolerances& tol) {
  const std::size_t N = uc.horizon;
  if (N < 32) throw DomainError("verify_upper: horizon must be >= 32");
  UpperDiagnostics d;
  d.window_lo = (N + 1) / 2;
  d.window_hi = N;

  double sum_c = 0.0, sum_s = 0.0, sum_alpha = 0.0;
  std::vector<double> sums_c(N), sums_alpha(N);
  for (std::size_t n = 1; n <= N; ++n) {
    sum_c += uc.log_c[n - 1].log();
    sum_s += uc.log_s[n - 1].log();
    sum_alpha += std::log(static_cast<double>(uc.alpha[n - 1]));
    sums_c[n - 1] = sum_c;
    sums_alpha[n - 1] = sum_alpha;
    const double p = psi.value(n);
    d.sum_c_ratio.push_back(sum_c / p);
    d.sum_s_ratio.push_back(sum_s / p);
  }

  d.sum_c_ratio_max = -std::numeric_limits<double>::infinity();
  d.sum_s_ratio_max = d.sum_c_ratio_max;
  for (std::size_t n = d.window_lo; n <= N; ++n) {
    d.sum_c_ratio_max = std::max(d.sum_c_ratio_max, d.sum_c_ratio[n - 1]);
    d.sum_s_ratio_max = std::max(d.sum_s_ratio_max, d.sum_s_ratio[n - 1]);
    d.alpha_sum_ratio_max = std::max(d.alpha_sum_ratio_max, sums_alpha[n - 1] / psi.value(n));
    if (uc.first_branch[n - 1] && uc.phi_equals_psi[n - 1]) ++d.first_branch_hits;
    if (n < N) {
      if (sums_c[n - 1] > 0.0)
        d.growth_ratio_max = std::max(d.growth_ratio_max, uc.log_c[n].log() / sums_c[n - 1]);
      d.alpha_growth_ratio_max = std::max(
          d.alpha_growth_ratio_max, std::log(static_cast<double>(uc.alpha[n])) / sums_alpha[n - 1]);
    }
  }

  d.sum_c_ok = std::fabs(d.sum_c_ratio_max - 1.0) <= tol.membership;
  d.sum_s_ok = std::fabs(d.sum_s_ratio_max - 1.0) <= tol.membership;
  d.growth_ok = d.growth_ratio_max <= uc.b - 1.0 + uc.epsilon + tol.growth;
  d.pass = d.sum_c_ok && d.sum_s_ok && d.growth_ok;
  return d;
}

}  // namespace fastkhin
