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

#ifndef FASTKHIN_CONSTRUCTIONS_HPP
#define FASTKHIN_CONSTRUCTIONS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastkhin/cf_core.hpp"
#include "fastkhin/growth.hpp"
#include "fastkhin/log_real.hpp"

namespace fastkhin {

// Admissible values of log a_n: [lo, hi], or [lo, hi) when hi_open.
struct LogWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool hi_open = false;
};

// ---------------------------------------------------------------------------
// Upper spectrum: Cantor set E({s_n}) with s_n = c_n + alpha_n.

struct UpperOptions {
  std::optional<double> b;  // overrides the declared / estimated b
  InvariantOptions invariant_options;
};

struct UpperConstruction {
  double epsilon = 0.0;
  double b = 0.0;
  std::size_t horizon = 0;
  // Index n-1 for n = 1..N.
  std::vector<LogReal> log_c;
  std::vector<std::uint64_t> alpha;
  std::vector<LogReal> log_s;
  std::vector<double> phi;             // phi(n) (a psi value, i.e. nats of c)
  std::vector<bool> phi_equals_psi;
  std::vector<bool> first_branch;      // c_n = e^{phi(n)} / prod_{k<n} c_k
  std::vector<std::size_t> staircase;  // n_1 < n_2 < ...
  bool phi_certified = false;

  std::vector<std::size_t> first_branch_positions() const;
  // s_n <= a_n < 2 s_n
  std::vector<LogWindow> windows() const;
};

// Log-domain recursion L_1 = phi(1),
// L_n = min(phi(n) - sum_{k<n} L_k, (b - 1 + eps) sum_{k<n} L_k),
// the alpha staircase and log s_n = log(e^{L_n} + alpha_n).
UpperConstruction build_upper(const GrowthFunction& psi, double epsilon, std::size_t N,
                              const UpperOptions& options = {});

struct UpperTolerances {
  double membership = 0.03;  // |ratio - 1| for the limsup-equals-one checks
  double growth = 1e-6;      // slack on L_{n+1} / sum L <= b - 1 + eps
};

struct UpperDiagnostics {
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  std::vector<double> sum_c_ratio;  // sum_{k<=n} L_k / psi(n)
  std::vector<double> sum_s_ratio;  // sum_{k<=n} log s_k / psi(n)
  double sum_c_ratio_max = 0.0;     // tail maxima
  double sum_s_ratio_max = 0.0;
  double growth_ratio_max = 0.0;    // L_{n+1} / sum_{k<=n} L_k
  double alpha_sum_ratio_max = 0.0;     // sum log alpha_k / psi(n)
  double alpha_growth_ratio_max = 0.0;  // log alpha_{n+1} / sum log alpha_k
  std::size_t first_branch_hits = 0;    // tail indices with branch 1 and phi = psi
  bool sum_c_ok = false;
  bool sum_s_ok = false;
  bool growth_ok = false;
  bool pass = false;
};

UpperDiagnostics verify_upper(const UpperConstruction& uc, const GrowthFunction& psi,
                              const UpperTolerances& tol = {});

// ---------------------------------------------------------------------------
// Lower spectrum: digits in W_i = [A_i^{1/Z}(1 - eps_i), A_i^{1/Z}(1 + eps_i)].

struct LowerOptions {
  std::optional<double> B;  // overrides the declared / estimated B
  double z_cap = 1e3;
  std::size_t dominated_run = 8;  // sup search stops after this many smaller terms
  std::size_t search_factor = 32;  // ... but never before index search_factor * (N + 1)
  double eps_floor = 1e-12;
  InvariantOptions invariant_options;
};

struct LowerConstruction {
  double epsilon = 0.0;
  double B = 0.0;
  std::size_t horizon = 0;
  // Index i-1 for i = 1..N+1.
  std::vector<LogReal> log_A;
  std::vector<std::size_t> t;
  std::vector<std::size_t> ell;  // distinct t_i, increasing
  double Z_est = 0.0;
  std::vector<double> log_eps;
  std::vector<LogWindow> windows;
  std::vector<bool> clipped;  // eps_i capped at 1/2
  std::vector<bool> widened;  // window enlarged to contain an integer
  std::size_t i0 = 1;         // no clipping or widening from here on
  bool sup_certified = true;  // every sup stopped on the dominated-run rule
  double partial_sum_tail_min = 0.0;  // liminf S_n psi / psi(n) estimate
};

// log A_i = max_{n >= i} psi(n) (B + eps)^{i - n}, t_i its smallest argmax,
// Z = min over the tail of sum_{i<=n} log A_i / psi(n), then eps_i and W_i.
LowerConstruction build_lower(const GrowthFunction& psi, double epsilon, std::size_t N,
                              const LowerOptions& options = {});

struct LowerTolerances {
  double membership = 0.03;
  double relative = 1e-12;  // exact identities up to rounding
};

struct LowerDiagnostics {
  bool growth_ok = false;      // log A_{i+1} <= (B + eps) log A_i
  bool floor_ok = false;       // log A_i >= psi(i)
  bool block_bound_ok = false; // block sums <= (B+eps)/(B+eps-1) psi(l_j)
  bool plateau_ok = false;     // t_i = t_{i+1} = ... = t_{t_i}
  bool ell_ok = false;         // log A_{l_j} = psi(l_j)
  bool z_ok = false;
  bool membership_ok = false;
  double block_ratio_max = 0.0;     // block sum / ((B+eps)/(B+eps-1) psi(l_j))
  double membership_ratio_min = 0.0;  // tail min of (1/Z) sum log A_i / psi(n)
  double perturbation_ratio = 0.0;    // |sum log(1 +- eps_i)| / psi(N)
  double eps_log_ratio = 0.0;         // |sum log 2 eps_i| / log A_{N+1}
  std::size_t i0 = 1;
  bool pass = false;
};

LowerDiagnostics verify_lower(const LowerConstruction& lc, const GrowthFunction& psi,
                              const LowerTolerances& tol = {});

// ---------------------------------------------------------------------------

enum class Provenance { upper, lower, luczak };

const char* to_string(Provenance p) noexcept;

struct SynthesizedPoint {
  PartialQuotients digits;
  Provenance provenance = Provenance::upper;
  std::vector<LogWindow> windows;
};

// a_n = ceil(e^{lo_n}) for n <= m, log a_n = (lo_n + hi_n) / 2 beyond.
// SynthesisError names the first window without an admissible digit.
SynthesizedPoint synthesize_point(std::span<const LogWindow> windows, std::size_t exact_prefix,
                                  Provenance provenance = Provenance::upper);

// True when every digit lies in its window.
bool digits_in_windows(const SynthesizedPoint& pt);

enum class MembershipTarget { upper, lower };

struct MembershipDiagnostics {
  std::vector<double> ratio;  // S_n / psi(n)
  double tail_max = 0.0;
  double tail_min = 0.0;
  bool pass = false;
};

MembershipDiagnostics verify_membership(const SynthesizedPoint& pt, const GrowthFunction& psi,
                                        MembershipTarget target, double tolerance = 0.03);

// log a_n = base^n log a for n = 1..N.
SynthesizedPoint luczak_witness(double a, double base, std::size_t N);

}  // namespace fastkhin

#endif  // FASTKHIN_CONSTRUCTIONS_HPP
