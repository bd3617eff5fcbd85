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

#ifndef FASTKHIN_DIMENSION_HPP
#define FASTKHIN_DIMENSION_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastkhin/constructions.hpp"
#include "fastkhin/growth.hpp"
#include "fastkhin/log_real.hpp"

namespace fastkhin {

// dim F({s_n}) = (2 + limsup log s_{n+1} / sum_{k<=n} log s_k)^{-1}, the
// limsup read as the max over n in [ceil(N/2), N-1].
struct FlwwResult {
  double value = 0.0;      // 1 / (2 + max ratio)
  double lo = 0.0;         // = value
  double hi = 0.0;         // 1 / (2 + min ratio)
  double ratio_max = 0.0;
  double ratio_min = 0.0;
  std::vector<double> ratio;  // index n-1, n = 1..N-1
  double hypothesis_max = 0.0;  // tail max |log(t_n - 1) / log s_n| (general form)
  std::vector<std::string> warnings;
};

FlwwResult flww_dim(std::span<const LogReal> log_s);

// Windows [s_n, s_n t_n). log_t holds log t_n > 0.
FlwwResult flww_general(std::span<const LogReal> log_s, std::span<const double> log_t);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct MeasureTrace {
  std::size_t horizon = 0;
  std::vector<double> log_p;     // index i-1, i = 1..N
  std::vector<double> log_mu_D;  // sum_{i<=n} log p_i
  std::vector<Bracket> log_len_I;
  std::vector<Bracket> log_len_D;
  std::vector<Bracket> d;        // log mu(D_n) / log |D_n|
  std::vector<double> mu_bound_ratio;  // -log mu(D_n) / (log A_{n+1} / (Z (B+eps-1)))
  Bracket d_liminf;              // tail minima of both ends
  double mu_bound_ratio_min = 0.0;
  double target = 0.0;           // 1 / (B + 1 + eps)
};

// Uniform measure on the window digits: exact counts on windows with
// e^hi <= 2^64, the log-width beyond.
MeasureTrace mass_distribution(const LowerConstruction& lc);

struct UpperCrossCheck {
  FlwwResult flww;
  double target_eps = 0.0;  // 1 / (1 + b + eps)
  double target = 0.0;      // 1 / (1 + b)
  double s_ratio_max = 0.0;      // tail max log s_{n+1} / sum log s_k
  double c_ratio_max = 0.0;      // tail max L_{n+1} / sum L_k
  double alpha_ratio_max = 0.0;  // tail max log alpha_{n+1} / sum log s_k
  bool in_band = false;          // target_eps - tol <= value <= target + tol
  bool out_of_hypothesis = false;
};

UpperCrossCheck cross_check_upper(const UpperConstruction& uc, double tolerance = 0.03);

struct SpectrumTolerances {
  double estimate = 0.03;    // relative, estimates against their bands
  double membership = 0.03;
  double invariants = 0.10;  // declared against estimated b, B, beta
};

struct DimensionReport {
  std::string family;
  std::string params;
  std::size_t horizon = 0;
  double epsilon = 0.0;
  GrowthInvariants estimated;
  std::optional<DeclaredInvariants> declared;
  // Values behind the predictions (declared when available).
  double b = 1.0;
  double B = 1.0;
  double beta = 1.0;
  double pred_full = 0.0;   // 1 / (1 + beta)
  double pred_upper = 0.0;  // 1 / (1 + b)
  double pred_lower = 0.0;  // 1 / (1 + B)
  bool out_of_hypothesis = false;
  std::string hypothesis_note;
  std::optional<double> est_upper;  // flww on the upper construction
  std::optional<double> est_lower;  // d_n liminf on the lower construction
  double envelope_ratio = 0.0;
  SpectrumTolerances tolerances;
  std::vector<std::string> flags;     // failures
  std::vector<std::string> warnings;
  bool pass() const noexcept { return flags.empty(); }
};

// Predictions only; infinite invariants give 0.
DimensionReport predict(const GrowthFunction& psi, std::size_t N,
                        const SpectrumTolerances& tol = {});

// predict() plus both constructions, their verifiers and the estimates.
DimensionReport spectrum_report(const GrowthFunction& psi, std::size_t N, double epsilon,
                                const SpectrumTolerances& tol = {});

}  // namespace fastkhin

#endif  // FASTKHIN_DIMENSION_HPP
