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

#ifndef FASTKHIN_GROWTH_HPP
#define FASTKHIN_GROWTH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fastkhin/cf_core.hpp"
#include "fastkhin/log_real.hpp"

namespace fastkhin {

enum class FamilyKind { geometric, double_exponential, table, oscillating, custom };

const char* to_string(FamilyKind kind) noexcept;

// Limits b, B, beta known in closed form from the family parameters.
// Infinite limits are +inf.
struct DeclaredInvariants {
  double b = 0.0;
  double B = 0.0;
  double beta = 0.0;
};

// Node placement of the oscillating family, see GrowthFunction::oscillating.
struct OscillatingShape {
  std::size_t first_node = 14;
  double ramp_ratio = 16.0;
};

namespace detail {
class GrowthSource;
struct GrowthMemo;
}  // namespace detail

// psi : N -> N, evaluated lazily. Values are exact integers while
// psi(n) <= 2^64 and carried by their logarithm beyond. Copies share the
// memo; the memo tolerates concurrent readers with a single writer.
class GrowthFunction {
 public:
  // psi(n) = ceil(base^n); exact powers for integral bases.
  static GrowthFunction geometric(double base);
  // log psi(n) = scale * n^power, power > 1.
  static GrowthFunction double_exponential(double scale, double power);
  // psi(1..size) from explicit integers >= 1.
  static GrowthFunction table(std::vector<BigInt> values);
  static GrowthFunction table(std::initializer_list<std::uint64_t> values);
  // Nondecreasing psi with liminf/limsup of log psi(n)/n equal to log b,
  // log B and limsup psi(n+1)/psi(n) = beta. Requires 1 < b <= B <= beta.
  static GrowthFunction oscillating(double b, double B, double beta, OscillatingShape shape = {});
  // log psi given by a callable. `monotone_from` certifies psi nondecreasing
  // from that index on.
  static GrowthFunction custom(std::string name, std::function<LogReal(std::size_t)> log_psi,
                               std::optional<std::size_t> monotone_from = std::nullopt);

  // lambda * psi (the level-1/lambda set has the same spectra).
  GrowthFunction scaled(std::uint64_t lambda) const;

  FamilyKind kind() const noexcept;
  std::string describe() const;
  std::uint64_t scale() const noexcept { return scale_; }

  // log psi(n), n >= 1.
  LogReal eval(std::size_t n) const;
  // psi(n) as a double; DomainError when it overflows.
  double value(std::size_t n) const;
  std::optional<BigInt> exact(std::size_t n) const;

  // Largest admissible index (tables), nullopt when unbounded.
  std::optional<std::size_t> last_index() const;
  // psi is nondecreasing on [monotone_from, inf) when set.
  std::optional<std::size_t> monotone_from() const;
  std::optional<DeclaredInvariants> declared() const;

 private:
  GrowthFunction(std::shared_ptr<const detail::GrowthSource> source, std::uint64_t scale);

  std::shared_ptr<const detail::GrowthSource> source_;
  std::shared_ptr<detail::GrowthMemo> memo_;
  std::uint64_t scale_ = 1;
};

inline GrowthFunction oscillating_family(double b, double B, double beta,
                                         OscillatingShape shape = {}) {
  return GrowthFunction::oscillating(b, B, beta, shape);
}

struct PhiValue {
  LogReal value;           // log phi(n)
  std::size_t argmin = 0;  // smallest k >= n attaining the minimum
  bool certified = false;
};

// phi(n) = min_{k >= n} psi(k). The search runs to max(H, monotone
// certificate); tables search to their end and are never certified.
PhiValue phi(const GrowthFunction& psi, std::size_t n, std::size_t horizon);

struct PhiSequence {
  std::vector<LogReal> log_phi;   // index n-1
  std::vector<std::size_t> argmin;  // smallest k >= n with psi(k) = phi(n)
  std::vector<bool> equals_psi;   // phi(n) == psi(n)
  std::size_t searched_to = 0;
  bool certified = false;
};

PhiSequence phi_sequence(const GrowthFunction& psi, std::size_t horizon);

struct InvariantOptions {
  double log_slope_cap = 30.0;      // log b, log B at or above this read as +inf
  double log_ratio_cap = 30.0;      // log beta at or above this reads as +inf
  double min_growth_exponent = 0.5;  // below: growth is subexponential, b = 1
};

struct GrowthInvariants {
  std::size_t horizon = 0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  double log_b = 0.0;
  double log_B = 0.0;
  double log_beta = 0.0;
  double b_est = 1.0;
  double B_est = 1.0;
  double beta_est = 1.0;
  // d log log psi / d log n between N/4 and N.
  double growth_exponent = 0.0;
  bool subexponential = false;
  bool beta_raised = false;  // window max step ratio was below B and lifted to it

  bool b_above_one() const noexcept { return !subexponential && log_b > 0.0; }
  bool B_above_one() const noexcept { return !subexponential && log_B > 0.0; }
};

// Finite-horizon b, B, beta over the tail window [ceil(N/2), N]. Throws
// InternalConsistencyError when 1 <= b <= B <= beta fails.
GrowthInvariants invariants(const GrowthFunction& psi, std::size_t N,
                            const InvariantOptions& options = {});

struct PartialSumDiagnostics {
  std::vector<double> ratio;        // S_n psi / psi(n), index n-1
  std::vector<double> running_min;  // min over k <= n
  double tail_min = 0.0;            // min over [ceil(N/2), N]
};

PartialSumDiagnostics psi_partial_sum_diagnostics(const GrowthFunction& psi, std::size_t N);

struct SuperlinearityWitness {
  bool certified = false;
  // min of log(psi(n)/n) over [N/8,N/4], [N/4,N/2], [N/2,N]
  std::vector<double> block_minima;
  std::string note;
};

SuperlinearityWitness check_superlinear(const GrowthFunction& psi, std::size_t N);

// min over the tail window of phi(n)/psi(n). Values near 1 suggest psi is
// equivalent to its nondecreasing minorant; no verdict is claimed.
double monotone_envelope_ratio(const GrowthFunction& psi, std::size_t N);

}  // namespace fastkhin

#endif  // FASTKHIN_GROWTH_HPP
