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
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fastkhin/constructions.hpp"

namespace fastkhin {

namespace {

using Float = boost::multiprecision::cpp_bin_float_100;

// Largest lower end for which digits are still materialized as integers.
constexpr double kMaxExactLog = 1e4;
// Relative slack when comparing a digit with its window ends; also the snap
// distance so that ceil(exp(log 3)) is 3 and not 4.
constexpr double kSnap = 1e-12;

BigInt ceil_exp(double lo) {
  const Float x = boost::multiprecision::exp(Float(lo));
  const Float r = boost::multiprecision::round(x);
  if (boost::multiprecision::abs(x - r) <= x * kSnap) return r.convert_to<BigInt>();
  return boost::multiprecision::ceil(x).convert_to<BigInt>();
}

bool log_in_window(double v, const LogWindow& w) {
  const double slack = kSnap * std::max(1.0, std::fabs(v));
  if (v < w.lo - slack) return false;
  return w.hi_open ? v < w.hi || v - w.hi < slack : v <= w.hi + slack;
}

bool exact_in_window(const BigInt& digit, const LogWindow& w) {
  const double v = log_of(digit);
  if (v < w.lo - kSnap * std::max(1.0, w.lo)) return false;
  if (w.hi_open) {
    // Strict on the open end unless rounding cannot tell.
    const Float hi = boost::multiprecision::exp(Float(w.hi));
    return Float(digit) < hi * (1 + kSnap);
  }
  return v <= w.hi + kSnap * std::max(1.0, w.hi);
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::upper:
      return "upper";
    case Provenance::lower:
      return "lower";
    case Provenance::luczak:
      return "luczak";
  }
  return "?";
}

SynthesizedPoint synthesize_point(std::span<const LogWindow> windows, std::size_t exact_prefix,
                                  Provenance provenance) {
  SynthesizedPoint pt;
  pt.provenance = provenance;
  pt.windows.assign(windows.begin(), windows.end());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const LogWindow& w = windows[i];
    const bool empty = w.lo > w.hi || (w.hi_open && w.lo == w.hi) || std::isnan(w.lo) ||
                       std::isnan(w.hi);
    if (empty) {
      std::ostringstream os;
      os << "synthesize_point: window " << i + 1 << " [" << w.lo << ", " << w.hi << "] is empty";
      throw SynthesisError(os.str(), i + 1);
    }
    if (w.lo < 0.0) {
      std::ostringstream os;
      os << "synthesize_point: window " << i + 1 << " lies below log 1";
      throw SynthesisError(os.str(), i + 1);
    }
    if (i < exact_prefix) {
      if (w.lo > kMaxExactLog)
        throw SynthesisError("synthesize_point: exact digit too large at index " +
                                 std::to_string(i + 1),
                             i + 1);
      BigInt digit = ceil_exp(w.lo);
      if (digit < 1) digit = 1;
      if (!exact_in_window(digit, w)) {
        std::ostringstream os;
        os << "synthesize_point: no integer in window " << i + 1 << " [" << w.lo << ", " << w.hi
           << (w.hi_open ? ")" : "]");
        throw SynthesisError(os.str(), i + 1);
      }
      pt.digits.push_exact(std::move(digit));
    } else {
      double mid = 0.5 * (w.lo + w.hi);
      if (w.hi_open && mid >= w.hi) mid = w.lo;
      pt.digits.push_log(mid);
    }
  }
  return pt;
}

bool digits_in_windows(const SynthesizedPoint& pt) {
  if (pt.digits.size() != pt.windows.size()) return false;
  for (std::size_t i = 0; i < pt.digits.size(); ++i) {
    const bool ok = pt.digits.is_exact(i) ? exact_in_window(pt.digits.exact(i), pt.windows[i])
                                          : log_in_window(pt.digits.log_digit(i), pt.windows[i]);
    if (!ok) return false;
  }
  return true;
}

MembershipDiagnostics verify_membership(const SynthesizedPoint& pt, const GrowthFunction& psi,
                                        MembershipTarget target, double tolerance) {
  const std::size_t N = pt.digits.size();
  if (N < 16) throw DomainError("verify_membership: at least 16 digits are required");
  MembershipDiagnostics d;
  d.ratio.reserve(N);
  d.tail_max = -std::numeric_limits<double>::infinity();
  d.tail_min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    sum += pt.digits.log_digit(n - 1);
    const double r = sum > 0.0 ? std::exp(std::log(sum) - psi.eval(n).log()) : 0.0;
    d.ratio.push_back(r);
    if (n >= (N + 1) / 2) {
      d.tail_max = std::max(d.tail_max, r);
      d.tail_min = std::min(d.tail_min, r);
    }
  }
  const double v = target == MembershipTarget::upper ? d.tail_max : d.tail_min;
  d.pass = std::fabs(v - 1.0) <= tolerance;
  return d;
}

SynthesizedPoint luczak_witness(double a, double base, std::size_t N) {
  if (!(a > 1.0) || !(base > 1.0)) throw DomainError("luczak_witness: a and base must exceed 1");
  std::vector<LogWindow> windows;
  windows.reserve(N);
  const double log_a = std::log(a);
  for (std::size_t n = 1; n <= N; ++n) {
    const double v = std::pow(base, static_cast<double>(n)) * log_a;
    windows.push_back({v, v, false});
  }
  return synthesize_point(windows, 0, Provenance::luczak);
}

}  // namespace fastkhin
