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

#include "fastkhin/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace fastkhin {

namespace mp = boost::multiprecision;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// log of the largest finite double
constexpr double kMaxDoubleLog = 709.782712893384;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Nearest integer when e^f is within 1e-9 relative of one (so 2^n built as
// exp(n log 2) comes back as 2^n), otherwise the ceiling. Only below 2^64.
std::optional<BigInt> integer_from_log(double f) {
  if (f > kExactLogLimit) return std::nullopt;
  const long double v = std::exp(static_cast<long double>(f));
  const long double r = std::nearbyint(v);
  long double out = (std::fabs(v - r) <= 1e-9L * v) ? r : std::ceil(v);
  if (out < 1.0L) out = 1.0L;
  return BigInt(out);
}

}  // namespace

const char* to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::geometric:
      return "geometric";
    case FamilyKind::double_exponential:
      return "double_exp";
    case FamilyKind::table:
      return "table";
    case FamilyKind::oscillating:
      return "oscillating";
    case FamilyKind::custom:
      return "custom";
  }
  return "unknown";
}

namespace detail {

class GrowthSource {
 public:
  virtual ~GrowthSource() = default;
  virtual FamilyKind kind() const = 0;
  virtual std::string describe() const = 0;
  // log psi(n) where no exact value is available
  virtual double log_at(std::size_t n) const = 0;
  virtual std::optional<BigInt> exact_at(std::size_t n) const = 0;
  virtual std::optional<std::size_t> last_index() const { return std::nullopt; }
  virtual std::optional<std::size_t> monotone_from() const = 0;
  virtual std::optional<DeclaredInvariants> declared() const { return std::nullopt; }
};

struct GrowthMemo {
  std::shared_mutex mutex;
  std::unordered_map<std::size_t, double> log_psi;
};

namespace {

class GeometricSource final : public GrowthSource {
 public:
  explicit GeometricSource(double base)
      : base_(base), log_base_(std::log(base)), integral_(base == std::floor(base) && base < 4e9) {}

  FamilyKind kind() const override { return FamilyKind::geometric; }
  std::string describe() const override { return "geometric(base=" + format_number(base_) + ")"; }
  double log_at(std::size_t n) const override { return static_cast<double>(n) * log_base_; }
  std::optional<BigInt> exact_at(std::size_t n) const override {
    const double f = log_at(n);
    if (f > kExactLogLimit) return std::nullopt;
    if (integral_) return mp::pow(BigInt(static_cast<std::uint64_t>(base_)), static_cast<unsigned>(n));
    return integer_from_log(f);
  }
  std::optional<std::size_t> monotone_from() const override { return 1; }
  std::optional<DeclaredInvariants> declared() const override {
    return DeclaredInvariants{base_, base_, base_};
  }

 private:
  double base_;
  double log_base_;
  bool integral_;
};

class DoubleExponentialSource final : public GrowthSource {
 public:
  DoubleExponentialSource(double scale, double power) : scale_(scale), power_(power) {}

  FamilyKind kind() const override { return FamilyKind::double_exponential; }
  std::string describe() const override {
    return "double_exp(scale=" + format_number(scale_) + ",power=" + format_number(power_) + ")";
  }
  double log_at(std::size_t n) const override {
    return scale_ * std::pow(static_cast<double>(n), power_);
  }
  std::optional<BigInt> exact_at(std::size_t n) const override { return integer_from_log(log_at(n)); }
  std::optional<std::size_t> monotone_from() const override { return 1; }
  std::optional<DeclaredInvariants> declared() const override {
    return DeclaredInvariants{kInf, kInf, kInf};
  }

 private:
  double scale_;
  double power_;
};

class TableSource final : public GrowthSource {
 public:
  explicit TableSource(std::vector<BigInt> values) : values_(std::move(values)) {}

  FamilyKind kind() const override { return FamilyKind::table; }
  std::string describe() const override {
    return "table(size=" + std::to_string(values_.size()) + ")";
  }
  double log_at(std::size_t n) const override { return log_of(at(n)); }
  std::optional<BigInt> exact_at(std::size_t n) const override { return at(n); }
  std::optional<std::size_t> last_index() const override { return values_.size(); }
  std::optional<std::size_t> monotone_from() const override { return std::nullopt; }

 private:
  const BigInt& at(std::size_t n) const {
    if (n == 0 || n > values_.size())
      throw RangeError("table growth function has no entry " + std::to_string(n), values_.size());
    return values_[n - 1];
  }
  std::vector<BigInt> values_;
};

// log psi is built from three kinds of pieces, block by block:
//   * a ramp of slope log B starting on the lower line f = n log b at L_k
//     and ending at U_k = round((R_0 + k) L_k), whose last step has slope
//     log beta instead;
//   * a plateau at f(U_k) until the first T_k > U_k with T_k log b >= f(U_k);
//   * the touch f(T_k) = T_k log b, which starts block k+1 (L_{k+1} = T_k).
// Before L_0 = first_node, f(n) = n log b. f(n)/n equals log b at every
// touch and reaches log B - (log B - log b)/R_k + O(1/n) at U_k, so the
// liminf is log b and, as R_k grows, the limsup is log B. The only steps of
// ratio above B are the beta steps, one per block.
class OscillatingSource final : public GrowthSource {
 public:
  OscillatingSource(double b, double B, double beta, OscillatingShape shape)
      : b_(b), B_(B), beta_(beta), shape_(shape), lb_(std::log(b)), lB_(std::log(B)),
        lbeta_(std::log(beta)) {
    std::size_t L = shape_.first_node;
    double F = static_cast<double>(L) * lb_;
    for (std::size_t k = 0; L < (std::size_t{1} << 40); ++k) {
      Block blk;
      blk.L = L;
      blk.F = F;
      const double ratio = shape_.ramp_ratio + static_cast<double>(k);
      blk.U = std::max(L + 1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(L))));
      blk.G = F + static_cast<double>(blk.U - 1 - L) * lB_ + lbeta_;
      const double touch = std::ceil(blk.G / lb_ - 1e-9);
      blk.T = std::max(blk.U + 1, static_cast<std::size_t>(touch));
      blocks_.push_back(blk);
      L = blk.T;
      F = std::max(blk.G, static_cast<double>(blk.T) * lb_);
    }
  }

  FamilyKind kind() const override { return FamilyKind::oscillating; }
  std::string describe() const override {
    return "oscillating(b=" + format_number(b_) + ",B=" + format_number(B_) +
           ",beta=" + format_number(beta_) + ")";
  }
  double log_at(std::size_t n) const override {
    if (n <= blocks_.front().L) return static_cast<double>(n) * lb_;
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), n,
                               [](std::size_t v, const Block& blk) { return v < blk.L; });
    const Block& blk = *std::prev(it);
    if (n == blk.L) return blk.F;
    if (n < blk.U) return blk.F + static_cast<double>(n - blk.L) * lB_;
    return blk.G;  // U <= n < T
  }
  std::optional<BigInt> exact_at(std::size_t n) const override { return integer_from_log(log_at(n)); }
  std::optional<std::size_t> monotone_from() const override { return 1; }
  std::optional<DeclaredInvariants> declared() const override {
    return DeclaredInvariants{b_, B_, beta_};
  }

 private:
  struct Block {
    std::size_t L = 0, U = 0, T = 0;
    double F = 0.0, G = 0.0;  // f(L), f(U)
  };
  double b_, B_, beta_;
  OscillatingShape shape_;
  double lb_, lB_, lbeta_;
  std::vector<Block> blocks_;
};

class CustomSource final : public GrowthSource {
 public:
  CustomSource(std::string name, std::function<LogReal(std::size_t)> fn,
               std::optional<std::size_t> monotone_from)
      : name_(std::move(name)), fn_(std::move(fn)), monotone_from_(monotone_from) {}

  FamilyKind kind() const override { return FamilyKind::custom; }
  std::string describe() const override { return "custom(" + name_ + ")"; }
  double log_at(std::size_t n) const override { return fn_(n).log(); }
  std::optional<BigInt> exact_at(std::size_t) const override { return std::nullopt; }
  std::optional<std::size_t> monotone_from() const override { return monotone_from_; }

 private:
  std::string name_;
  std::function<LogReal(std::size_t)> fn_;
  std::optional<std::size_t> monotone_from_;
};

}  // namespace
}  // namespace detail

GrowthFunction::GrowthFunction(std::shared_ptr<const detail::GrowthSource> source,
                               std::uint64_t scale)
    : source_(std::move(source)), memo_(std::make_shared<detail::GrowthMemo>()), scale_(scale) {}

GrowthFunction GrowthFunction::geometric(double base) {
  if (!(base > 1.0) || !std::isfinite(base)) throw DomainError("geometric: base must be > 1");
  return GrowthFunction(std::make_shared<detail::GeometricSource>(base), 1);
}

GrowthFunction GrowthFunction::double_exponential(double scale, double power) {
  if (!(scale > 0.0) || !(power > 1.0) || !std::isfinite(scale) || !std::isfinite(power))
    throw DomainError("double_exp: need scale > 0 and power > 1");
  return GrowthFunction(std::make_shared<detail::DoubleExponentialSource>(scale, power), 1);
}

GrowthFunction GrowthFunction::table(std::vector<BigInt> values) {
  if (values.empty()) throw DomainError("table: empty");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < 1)
      throw FamilyDefinitionError("table: psi(" + std::to_string(i + 1) + ") < 1");
  return GrowthFunction(std::make_shared<detail::TableSource>(std::move(values)), 1);
}

GrowthFunction GrowthFunction::table(std::initializer_list<std::uint64_t> values) {
  std::vector<BigInt> v;
  v.reserve(values.size());
  for (auto x : values) v.emplace_back(x);
  return table(std::move(v));
}

GrowthFunction GrowthFunction::oscillating(double b, double B, double beta, OscillatingShape shape) {
  if (!(b > 1.0) || !(B >= b) || !(beta >= B) || !std::isfinite(beta))
    throw DomainError("oscillating: need 1 < b <= B <= beta < inf");
  if (shape.first_node < 1 || !(shape.ramp_ratio > 1.0))
    throw DomainError("oscillating: need first_node >= 1 and ramp_ratio > 1");
  return GrowthFunction(std::make_shared<detail::OscillatingSource>(b, B, beta, shape), 1);
}

GrowthFunction GrowthFunction::custom(std::string name, std::function<LogReal(std::size_t)> log_psi,
                                      std::optional<std::size_t> monotone_from) {
  if (!log_psi) throw DomainError("custom: empty callable");
  return GrowthFunction(
      std::make_shared<detail::CustomSource>(std::move(name), std::move(log_psi), monotone_from), 1);
}

GrowthFunction GrowthFunction::scaled(std::uint64_t lambda) const {
  if (lambda == 0) throw DomainError("scaled: lambda must be >= 1");
  return GrowthFunction(source_, scale_ * lambda);
}

FamilyKind GrowthFunction::kind() const noexcept { return source_->kind(); }

std::string GrowthFunction::describe() const {
  std::string s = source_->describe();
  if (scale_ != 1) s = std::to_string(scale_) + "*" + s;
  return s;
}

std::optional<BigInt> GrowthFunction::exact(std::size_t n) const {
  if (n == 0) throw DomainError("growth functions are indexed from 1");
  auto e = source_->exact_at(n);
  if (e && scale_ != 1) *e *= scale_;
  return e;
}

LogReal GrowthFunction::eval(std::size_t n) const {
  if (n == 0) throw DomainError("growth functions are indexed from 1");
  {
    std::shared_lock lock(memo_->mutex);
    if (auto it = memo_->log_psi.find(n); it != memo_->log_psi.end())
      return LogReal::from_log(it->second);
  }
  double f;
  if (auto e = exact(n)) {
    if (*e < 1) throw FamilyDefinitionError(describe() + ": psi(" + std::to_string(n) + ") < 1");
    f = log_of(*e);
  } else {
    f = source_->log_at(n);
    if (std::isnan(f) || f < 0.0)
      throw FamilyDefinitionError(describe() + ": psi(" + std::to_string(n) + ") < 1");
    if (scale_ != 1) f += std::log(static_cast<double>(scale_));
  }

  std::unique_lock lock(memo_->mutex);
  if (auto mf = source_->monotone_from(); mf && n >= *mf) {
    const double tol = 1e-12 * std::max(1.0, std::fabs(f));
    auto prev = memo_->log_psi.find(n - 1);
    auto next = memo_->log_psi.find(n + 1);
    if ((n - 1 >= *mf && prev != memo_->log_psi.end() && prev->second > f + tol) ||
        (next != memo_->log_psi.end() && next->second < f - tol))
      throw FamilyDefinitionError(describe() + ": not nondecreasing at " + std::to_string(n));
  }
  memo_->log_psi.emplace(n, f);
  return LogReal::from_log(f);
}

double GrowthFunction::value(std::size_t n) const {
  if (auto e = exact(n)) return to_double(*e);
  const double f = eval(n).log();
  if (f > kMaxDoubleLog)
    throw DomainError(describe() + ": psi(" + std::to_string(n) + ") exceeds double range");
  return std::exp(f);
}

std::optional<std::size_t> GrowthFunction::last_index() const { return source_->last_index(); }
std::optional<std::size_t> GrowthFunction::monotone_from() const { return source_->monotone_from(); }
std::optional<DeclaredInvariants> GrowthFunction::declared() const { return source_->declared(); }

namespace {

// End of the phi search and whether it is backed by a certificate.
std::pair<std::size_t, bool> phi_search_end(const GrowthFunction& psi, std::size_t n,
                                            std::size_t horizon) {
  std::size_t end = std::max(horizon, n);
  if (auto last = psi.last_index()) {
    if (*last < end)
      throw RangeError("phi: table ends at " + std::to_string(*last) + " before horizon " +
                           std::to_string(end),
                       *last);
    return {*last, false};
  }
  if (auto mf = psi.monotone_from()) return {std::max(end, *mf), true};
  return {end, false};
}

}  // namespace

PhiValue phi(const GrowthFunction& psi, std::size_t n, std::size_t horizon) {
  if (n == 0) throw DomainError("phi: n must be >= 1");
  const auto [end, certified] = phi_search_end(psi, n, horizon);
  PhiValue out;
  out.value = psi.eval(n);
  out.argmin = n;
  out.certified = certified;
  for (std::size_t k = n + 1; k <= end; ++k) {
    const LogReal v = psi.eval(k);
    if (v < out.value) {
      out.value = v;
      out.argmin = k;
    }
  }
  return out;
}

PhiSequence phi_sequence(const GrowthFunction& psi, std::size_t horizon) {
  if (horizon == 0) throw DomainError("phi_sequence: horizon must be >= 1");
  const auto [end, certified] = phi_search_end(psi, 1, horizon);
  PhiSequence out;
  out.searched_to = end;
  out.certified = certified;
  std::vector<LogReal> suffix_min(end);
  std::vector<std::size_t> suffix_arg(end);
  LogReal running = LogReal::infinity();
  std::size_t arg = end;
  for (std::size_t k = end; k >= 1; --k) {
    const LogReal v = psi.eval(k);
    if (v <= running) {  // ties move the argmin left
      running = v;
      arg = k;
    }
    suffix_min[k - 1] = running;
    suffix_arg[k - 1] = arg;
  }
  out.log_phi.assign(suffix_min.begin(), suffix_min.begin() + static_cast<std::ptrdiff_t>(horizon));
  out.argmin.assign(suffix_arg.begin(), suffix_arg.begin() + static_cast<std::ptrdiff_t>(horizon));
  out.equals_psi.resize(horizon);
  for (std::size_t n = 1; n <= horizon; ++n) out.equals_psi[n - 1] = out.log_phi[n - 1] == psi.eval(n);
  return out;
}

GrowthInvariants invariants(const GrowthFunction& psi, std::size_t N, const InvariantOptions& options) {
  if (N < 16) throw DomainError("invariants: horizon must be >= 16");
  GrowthInvariants inv;
  inv.horizon = N;
  inv.window_lo = (N + 1) / 2;
  inv.window_hi = N;

  double log_b = kInf, log_B = -kInf, log_beta = -kInf;
  for (std::size_t n = inv.window_lo; n <= N; ++n) {
    const double f = psi.eval(n).log();
    const double slope = f / static_cast<double>(n);
    log_b = std::min(log_b, slope);
    log_B = std::max(log_B, slope);
    if (n < N) log_beta = std::max(log_beta, psi.eval(n + 1).log() - f);
  }

  auto tol = [](double x) { return 1e-9 * std::max(1.0, std::fabs(x)); };
  if (log_b < -tol(log_b) || log_b > log_B + tol(log_B)) {
    std::ostringstream os;
    os << psi.describe() << ": estimates violate 1 <= b <= B <= beta (log b=" << log_b
       << ", log B=" << log_B << ", log beta=" << log_beta << ")";
    throw InternalConsistencyError(os.str());
  }
  log_b = std::max(log_b, 0.0);
  // B <= beta holds for the limits but not for every finite window (slowly
  // growing psi has its largest step ratio below its largest slope).
  if (log_beta < log_B - tol(log_B)) inv.beta_raised = true;
  log_beta = std::max(log_beta, log_B);

  if (log_b >= options.log_slope_cap) log_b = kInf;
  if (log_B >= options.log_slope_cap) log_B = kInf;
  if (log_beta >= options.log_ratio_cap) log_beta = kInf;
  inv.log_b = log_b;
  inv.log_B = log_B;
  inv.log_beta = log_beta;
  inv.b_est = std::exp(log_b);
  inv.B_est = std::exp(log_B);
  inv.beta_est = std::exp(log_beta);

  const std::size_t quarter = (N + 3) / 4;
  const double f_lo = psi.eval(quarter).log();
  const double f_hi = psi.eval(N).log();
  if (f_lo <= 0.0) {
    inv.growth_exponent = f_hi > 0.0 ? kInf : 0.0;
  } else {
    inv.growth_exponent = (std::log(f_hi) - std::log(f_lo)) /
                          std::log(static_cast<double>(N) / static_cast<double>(quarter));
  }
  inv.subexponential = inv.growth_exponent < options.min_growth_exponent;
  return inv;
}

PartialSumDiagnostics psi_partial_sum_diagnostics(const GrowthFunction& psi, std::size_t N) {
  if (N < 2) throw DomainError("psi_partial_sum_diagnostics: N must be >= 2");
  PartialSumDiagnostics d;
  d.ratio.reserve(N);
  d.running_min.reserve(N);
  LogReal sum = LogReal::zero();
  double running = kInf;
  d.tail_min = kInf;
  for (std::size_t n = 1; n <= N; ++n) {
    const LogReal v = psi.eval(n);
    sum += v;
    const double r = std::exp(sum.log() - v.log());
    running = std::min(running, r);
    d.ratio.push_back(r);
    d.running_min.push_back(running);
    if (n >= (N + 1) / 2) d.tail_min = std::min(d.tail_min, r);
  }
  return d;
}

SuperlinearityWitness check_superlinear(const GrowthFunction& psi, std::size_t N) {
  if (N < 8) throw DomainError("check_superlinear: N must be >= 8");
  SuperlinearityWitness w;
  const std::size_t edges[] = {(N + 7) / 8, (N + 3) / 4, (N + 1) / 2, N};
  for (int blk = 0; blk < 3; ++blk) {
    double m = kInf;
    for (std::size_t n = edges[blk]; n <= edges[blk + 1]; ++n)
      m = std::min(m, psi.eval(n).log() - std::log(static_cast<double>(n)));
    w.block_minima.push_back(m);
  }
  w.certified = w.block_minima[0] < w.block_minima[1] && w.block_minima[1] < w.block_minima[2] &&
                w.block_minima[2] > 0.0;
  if (!w.certified)
    w.note = "psi(n)/n not seen to diverge on [N/8, N]; horizon too short to certify";
  return w;
}

double monotone_envelope_ratio(const GrowthFunction& psi, std::size_t N) {
  const auto seq = phi_sequence(psi, N);
  double worst = 0.0;
  for (std::size_t n = (N + 1) / 2; n <= N; ++n)
    worst = std::min(worst, seq.log_phi[n - 1].log() - psi.eval(n).log());
  return std::exp(worst);
}

}  // namespace fastkhin
