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

#include "fastkhin/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fastkhin/errors.hpp"

namespace fastkhin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

double prediction(double x) { return std::isinf(x) ? 0.0 : 1.0 / (1.0 + x); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Integers in [e^lo, e^hi] for windows small enough to count exactly.
long double integer_count(const LogWindow& w) {
  const long double lo = std::exp(static_cast<long double>(w.lo));
  const long double hi = std::exp(static_cast<long double>(w.hi));
  const long double snap = 1e-12L;
  long double first = std::ceil(lo);
  if (first - lo > 1.0L - snap * lo) first -= 1.0L;  // lo a hair above an integer
  long double last = std::floor(hi);
  if (last + 1.0L - hi < snap * hi) last += 1.0L;
  if (w.hi_open && last >= hi) last -= 1.0L;
  return std::max(1.0L, last - first + 1.0L);
}

}  // namespace

FlwwResult flww_dim(std::span<const LogReal> log_s) {
  const std::size_t N = log_s.size();
  if (N < 8) throw DomainError("flww_dim: at least 8 terms are required");
  FlwwResult r;
  r.ratio.reserve(N - 1);
  double cum = 0.0;
  for (std::size_t n = 1; n < N; ++n) {
    cum += log_s[n - 1].log();
    const double next = log_s[n].log();
    r.ratio.push_back(cum > 0.0 ? next / cum : kInf);
  }
  const std::size_t lo = (N + 1) / 2;
  r.ratio_max = -kInf;
  r.ratio_min = kInf;
  for (std::size_t n = lo; n < N; ++n) {
    r.ratio_max = std::max(r.ratio_max, r.ratio[n - 1]);
    r.ratio_min = std::min(r.ratio_min, r.ratio[n - 1]);
  }
  r.value = std::isinf(r.ratio_max) ? 0.0 : 1.0 / (2.0 + std::max(0.0, r.ratio_max));
  r.lo = r.value;
  r.hi = std::isinf(r.ratio_min) ? 0.0 : 1.0 / (2.0 + std::max(0.0, r.ratio_min));
  if (!(log_s[N - 1].log() > log_s[lo - 1].log()) || !(log_s[N - 1].log() > 0.0))
    r.warnings.push_back("log s_n does not grow on the tail window");
  return r;
}

FlwwResult flww_general(std::span<const LogReal> log_s, std::span<const double> log_t) {
  if (log_s.size() != log_t.size()) throw DomainError("flww_general: length mismatch");
  for (std::size_t n = 0; n < log_s.size(); ++n) {
    if (!(log_t[n] > 0.0)) throw DomainError("flww_general: t_" + std::to_string(n + 1) + " <= 1");
    const double ls = log_s[n].log();
    if (ls + log_t[n] <= kExactLogLimit) {
      const long double s = std::exp(static_cast<long double>(ls));
      const long double top = std::exp(static_cast<long double>(ls + log_t[n]));
      const long double first = std::ceil(s * (1.0L - 1e-15L));
      if (!(first < top))
        throw DomainError("flww_general: window " + std::to_string(n + 1) +
                          " contains no integer");
    }
  }
  FlwwResult r = flww_dim(log_s);
  const std::size_t N = log_s.size();
  for (std::size_t n = (N + 1) / 2; n <= N; ++n) {
    const double ls = log_s[n - 1].log();
    if (!(ls > 0.0)) continue;
    const double h = std::log(std::expm1(log_t[n - 1])) / ls;
    r.hypothesis_max = std::max(r.hypothesis_max, std::fabs(h));
  }
  if (r.hypothesis_max > 0.1)
    r.warnings.push_back("log(t_n - 1) / log s_n does not vanish on the tail (max " +
                         fmt(r.hypothesis_max) + ")");
  return r;
}

MeasureTrace mass_distribution(const LowerConstruction& lc) {
  const std::size_t N = lc.horizon;
  MeasureTrace m;
  m.horizon = N;
  m.target = 1.0 / (lc.B + 1.0 + lc.epsilon);
  const double mu_scale = lc.Z_est * (lc.B + lc.epsilon - 1.0);
  double log_mu = 0.0, sum_lo = 0.0, sum_hi = 0.0;
  m.d_liminf = {kInf, kInf};
  m.mu_bound_ratio_min = kInf;
  for (std::size_t n = 1; n <= N; ++n) {
    const LogWindow& w = lc.windows[n - 1];
    double log_p;
    if (w.hi <= kExactLogLimit) {
      log_p = -std::log(static_cast<double>(integer_count(w)));
    } else if (lc.widened[n - 1] || w.lo == 0.0) {
      const double log_width = w.hi + std::log(-std::expm1(w.lo - w.hi));
      log_p = -std::max(0.0, log_width);
    } else {
      // The window ends may coincide in double precision; 2 eps_i A_i^{1/Z} does not.
      log_p = -std::max(0.0, lc.log_A[n - 1].log() / lc.Z_est + kLn2 + lc.log_eps[n - 1]);
    }
    log_mu += log_p;
    sum_lo += w.lo;
    sum_hi += w.hi;
    m.log_p.push_back(log_p);
    m.log_mu_D.push_back(log_mu);

    const Bracket I{-2.0 * sum_hi - 2.0 * static_cast<double>(n) * kLn2, -2.0 * sum_lo};
    const double next_lo = lc.windows[n].lo;
    const Bracket D{I.lo - next_lo - kLn2, std::min(I.hi - next_lo + kLn2, I.hi)};
    m.log_len_I.push_back(I);
    m.log_len_D.push_back(D);

    const double num = -log_mu;
    Bracket d{num / -D.lo, D.hi < 0.0 ? num / -D.hi : 1.0};
    d.lo = std::min(d.lo, 1.0);
    d.hi = std::min(d.hi, 1.0);
    m.d.push_back(d);
    const double ratio = num / (lc.log_A[n].log() / mu_scale);
    m.mu_bound_ratio.push_back(ratio);
    if (n >= (N + 1) / 2) {
      m.d_liminf.lo = std::min(m.d_liminf.lo, d.lo);
      m.d_liminf.hi = std::min(m.d_liminf.hi, d.hi);
      m.mu_bound_ratio_min = std::min(m.mu_bound_ratio_min, ratio);
    }
  }
  return m;
}

UpperCrossCheck cross_check_upper(const UpperConstruction& uc, double tolerance) {
  UpperCrossCheck c;
  c.flww = flww_dim(uc.log_s);
  c.target_eps = 1.0 / (1.0 + uc.b + uc.epsilon);
  c.target = prediction(uc.b);
  c.s_ratio_max = c.flww.ratio_max;
  const std::size_t N = uc.log_s.size();
  double sum_c = 0.0, sum_s = 0.0;
  c.c_ratio_max = 0.0;
  c.alpha_ratio_max = 0.0;
  bool any_c = false;
  for (std::size_t n = 1; n < N; ++n) {
    sum_c += uc.log_c[n - 1].log();
    sum_s += uc.log_s[n - 1].log();
    if (uc.log_c[n - 1].log() > 0.0) any_c = true;
    if (n < (N + 1) / 2) continue;
    if (sum_c > 0.0) c.c_ratio_max = std::max(c.c_ratio_max, uc.log_c[n].log() / sum_c);
    if (sum_s > 0.0)
      c.alpha_ratio_max = std::max(
          c.alpha_ratio_max, std::log(static_cast<double>(uc.alpha[n])) / sum_s);
  }
  c.out_of_hypothesis = !(uc.b > 1.0) || !any_c;
  c.in_band = c.flww.value >= c.target_eps * (1.0 - tolerance) &&
              c.flww.value <= c.target * (1.0 + tolerance);
  return c;
}

DimensionReport predict(const GrowthFunction& psi, std::size_t N, const SpectrumTolerances& tol) {
  DimensionReport r;
  r.family = to_string(psi.kind());
  r.params = psi.describe();
  r.horizon = N;
  r.tolerances = tol;
  try {
    r.estimated = invariants(psi, N);
  } catch (const InternalConsistencyError& e) {
    r.flags.push_back(std::string("inconsistent_invariants: ") + e.what());
    r.out_of_hypothesis = true;
    return r;
  }
  if (r.estimated.beta_raised) r.warnings.push_back("beta estimate raised to the B estimate");
  r.declared = psi.declared();
  if (r.declared) {
    r.b = r.declared->b;
    r.B = r.declared->B;
    r.beta = r.declared->beta;
    const double est[] = {r.estimated.b_est, r.estimated.B_est, r.estimated.beta_est};
    const double dec[] = {r.b, r.B, r.beta};
    const char* name[] = {"b", "B", "beta"};
    for (int k = 0; k < 3; ++k) {
      const bool both_inf = std::isinf(est[k]) && std::isinf(dec[k]);
      if (!both_inf && !(std::fabs(est[k] / dec[k] - 1.0) <= tol.invariants))
        r.warnings.push_back(std::string("estimated ") + name[k] + " " + fmt(est[k]) +
                             " differs from declared " + fmt(dec[k]));
    }
  } else {
    r.b = r.estimated.b_above_one() ? r.estimated.b_est : 1.0;
    r.B = r.estimated.B_above_one() ? r.estimated.B_est : 1.0;
    r.beta = std::max(r.B, r.estimated.beta_est);
  }
  r.pred_full = prediction(r.beta);
  r.pred_upper = prediction(r.b);
  r.pred_lower = prediction(r.B);
  if (r.estimated.subexponential || !(r.b > 1.0) || !(r.B > 1.0)) {
    r.out_of_hypothesis = true;
    r.hypothesis_note = "b, B in (1, inf] required";
    r.flags.push_back("out_of_hypothesis");
  } else {
    r.hypothesis_note = "1/(1+beta) assumes psi(n)/n -> inf";
    try {
      if (!check_superlinear(psi, N).certified)
        r.warnings.push_back("psi(n)/n -> inf not witnessed at this horizon");
      r.envelope_ratio = monotone_envelope_ratio(psi, N);
    } catch (const std::exception& e) {
      r.warnings.push_back(std::string("diagnostics skipped: ") + e.what());
    }
  }
  return r;
}

DimensionReport spectrum_report(const GrowthFunction& psi, std::size_t N, double epsilon,
                                const SpectrumTolerances& tol) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw DomainError("spectrum_report: epsilon must lie in (0, 1)");
  DimensionReport r = predict(psi, N, tol);
  r.epsilon = epsilon;
  if (r.out_of_hypothesis) return r;

  if (std::isinf(r.b)) {
    r.warnings.push_back("upper construction skipped (b = inf)");
  } else if (N < 32) {
    r.warnings.push_back("upper construction skipped (N < 32)");
  } else {
    double eps_u = epsilon;
    if (!(eps_u < (r.b - 1.0) / 2.0)) {
      eps_u = (r.b - 1.0) / 4.0;
      r.warnings.push_back("upper construction uses epsilon " + fmt(eps_u));
    }
    try {
      UpperOptions uo;
      uo.b = r.b;
      const auto uc = build_upper(psi, eps_u, N, uo);
      UpperTolerances ut;
      ut.membership = tol.membership;
      if (!verify_upper(uc, psi, ut).pass) r.flags.push_back("upper_verify_failed");
      const auto cc = cross_check_upper(uc, tol.estimate);
      r.est_upper = cc.flww.value;
      for (const auto& w : cc.flww.warnings) r.warnings.push_back("upper: " + w);
      if (!cc.in_band) r.warnings.push_back("est_upper outside [1/(1+b+eps), 1/(1+b)]");
      if (!uc.phi_certified) r.warnings.push_back("phi not certified beyond the table");
    } catch (const HypothesisError& e) {
      r.flags.push_back(std::string("upper_hypothesis: ") + e.what());
    } catch (const ConstructionError& e) {
      r.flags.push_back(std::string("upper_construction: ") + e.what());
    }
  }

  if (std::isinf(r.B)) {
    r.warnings.push_back("lower construction skipped (B = inf)");
  } else {
    try {
      LowerOptions lo;
      lo.B = r.B;
      const auto lc = build_lower(psi, epsilon, N, lo);
      LowerTolerances lt;
      lt.membership = tol.membership;
      if (!verify_lower(lc, psi, lt).pass) r.flags.push_back("lower_verify_failed");
      const auto md = mass_distribution(lc);
      r.est_lower = md.d_liminf.lo;
      const double band_lo = md.target * (1.0 - tol.estimate);
      const double band_hi = r.pred_lower * (1.0 + tol.estimate);
      if (!(*r.est_lower >= band_lo && *r.est_lower <= band_hi))
        r.warnings.push_back("est_lower outside [1/(1+B+eps), 1/(1+B)]");
      if (!lc.sup_certified) r.warnings.push_back("sup defining A_i cut at the table end");
    } catch (const HypothesisError& e) {
      r.flags.push_back(std::string("lower_hypothesis: ") + e.what());
    } catch (const ConstructionError& e) {
      r.flags.push_back(std::string("lower_construction: ") + e.what());
    } catch (const RangeError& e) {
      r.flags.push_back(std::string("lower_construction: ") + e.what());
    }
  }
  return r;
}

}  // namespace fastkhin
