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

// Acceptance run: one line per criterion, nonzero exit if any fails.
// Usage: acceptance [scratch-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fastkhin/cf_core.hpp"
#include "fastkhin/cli.hpp"
#include "fastkhin/constructions.hpp"
#include "fastkhin/dimension.hpp"
#include "fastkhin/growth.hpp"

using namespace fastkhin;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double x, double target, double tol) { return std::fabs(x / target - 1.0) <= tol; }

GrowthFunction table_from(const std::vector<double>& v) {
  std::vector<BigInt> b;
  for (double x : v) b.emplace_back(BigInt(x));
  return GrowthFunction::table(std::move(b));
}

struct Outcome {
  bool pass;
  std::string detail;
};

// 1: every digit string over {1..5} of length 1..5, checked against q_n from plain integers.
Outcome sweep() {
  const auto t0 = Clock::now();
  std::size_t count = 0, failures = 0;
  std::vector<std::uint64_t> v;
  std::function<void()> visit = [&] {
    if (!v.empty()) {
      ++count;
      PartialQuotients d;
      for (auto a : v) d.push_exact(BigInt(a));
      const auto I = basic_interval(d);
      std::int64_t q_prev = 0, q = 1, prod = 1;
      for (auto a : v) {
        const std::int64_t next = static_cast<std::int64_t>(a) * q + q_prev;
        q_prev = q;
        q = next;
        prod *= static_cast<std::int64_t>(a);
      }
      const Rational len(1, q * (q + q_prev));
      const std::int64_t lo_den = (prod << v.size()) * (prod << v.size());
      const bool ok = I.length == len && I.lower_bound_holds && I.upper_bound_holds &&
                      len >= Rational(1, lo_den) && len <= Rational(1, prod * prod);
      failures += !ok;
    }
    if (v.size() == 5) return;
    for (std::uint64_t a = 1; a <= 5; ++a) {
      v.push_back(a);
      visit();
      v.pop_back();
    }
  };
  visit();
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu intervals, %zu failures, %.3f s", count, failures, secs);
  return {count == 3905 && failures == 0 && secs < 5.0, buf};
}

// 2
Outcome khintchine() {
  const auto t0 = Clock::now();
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const auto s = khintchine_monte_carlo(1000, 100, 300, 20261016, threads);
  const double secs = seconds_since(t0);
  const double reference = std::log(2.6854520010653064);
  char buf[200];
  std::snprintf(buf, sizeof buf, "mean %.6f (reference %.6f, rel err %.4f), truncated %zu, %.2f s",
                s.mean, reference, std::fabs(s.mean / reference - 1.0), s.truncated, secs);
  return {rel_close(s.mean, reference, 0.02) && secs < 60.0, buf};
}

// 3
Outcome upper_geometric() {
  const auto psi = GrowthFunction::geometric(2);
  const auto uc = build_upper(psi, 0.1, 60);
  const auto d = verify_upper(uc, psi);
  const auto f = flww_dim(uc.log_s);
  const bool ok = d.sum_s_ratio_max >= 0.97 && d.sum_s_ratio_max <= 1.03 &&
                  d.growth_ratio_max <= 1.1 + 1e-6 && rel_close(f.value, 1.0 / 3.0, 0.03);
  char buf[200];
  std::snprintf(buf, sizeof buf, "sum log s / psi tail max %.9f, growth max %.9f, flww %.6f",
                d.sum_s_ratio_max, d.growth_ratio_max, f.value);
  return {ok, buf};
}

// 4
Outcome lower_geometric() {
  const auto psi = GrowthFunction::geometric(3);
  const auto lc = build_lower(psi, 0.5, 40);
  bool t_ok = lc.t.size() == 41;
  for (std::size_t i = 1; t_ok && i <= lc.t.size(); ++i) t_ok = lc.t[i - 1] == i;
  const auto m = mass_distribution(lc);
  const auto d = verify_lower(lc, psi);
  const bool ok = t_ok && rel_close(lc.Z_est, 1.5, 0.02) && rel_close(m.d_liminf.lo, 0.25, 0.03) &&
                  rel_close(m.d_liminf.hi, 0.25, 0.03) && d.growth_ok && d.floor_ok && d.block_bound_ok;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "t_i = i: %s, Z %.9f, d liminf [%.9f, %.9f], growth %s, floor %s, block max %.6f",
                t_ok ? "yes" : "no", lc.Z_est, m.d_liminf.lo, m.d_liminf.hi, d.growth_ok ? "ok" : "FAIL",
                d.floor_ok ? "ok" : "FAIL", d.block_ratio_max);
  return {ok, buf};
}

// 5
Outcome distinct_spectra() {
  const auto r = predict(GrowthFunction::oscillating(2, 3, 5), 400);
  const auto& e = r.estimated;
  const bool est_ok = rel_close(e.b_est, 2, 0.1) && rel_close(e.B_est, 3, 0.1) && rel_close(e.beta_est, 5, 0.1);
  const bool triple_ok = r.pred_full == 1.0 / 6.0 && r.pred_upper == 1.0 / 3.0 && r.pred_lower == 1.0 / 4.0;

  // b <= B <= beta maps to pred_full <= pred_lower <= pred_upper under x -> 1/(1+x)
  auto chain = [](const DimensionReport& d) {
    return 0.0 <= d.pred_full && d.pred_full <= d.pred_lower && d.pred_lower <= d.pred_upper &&
           d.pred_upper <= 0.5;
  };
  auto literal = [](const DimensionReport& d) {
    return d.pred_lower <= d.pred_upper && d.pred_upper <= d.pred_full;
  };
  std::size_t chain_ok = chain(r), literal_ok = literal(r), total = 1;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k, ++total) {
    const double b = 1.1 + 3 * u(rng), B = b * (1 + u(rng)), beta = B * (1 + 2 * u(rng));
    const auto psi = k % 2 ? GrowthFunction::oscillating(b, B, beta) : GrowthFunction::geometric(b);
    const auto p = predict(psi, 64 + 4 * static_cast<std::size_t>(k));
    chain_ok += chain(p);
    literal_ok += literal(p);
  }
  std::printf("[INFO] 5: order pred_lower <= pred_upper <= pred_full as written holds on %zu/%zu "
              "families (only where b = B = beta)\n",
              literal_ok, total);
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "estimates (%.4f, %.4f, %.4f), triple (%.6f, %.6f, %.6f), "
                "chain full <= lower <= upper <= 1/2 on %zu/%zu",
                e.b_est, e.B_est, e.beta_est, r.pred_full, r.pred_upper, r.pred_lower, chain_ok, total);
  return {est_ok && triple_ok && chain_ok == total, buf};
}

// 6: smallest x >= psi with x_{i+1} <= (B + eps) x_i, by relaxation
Outcome minimality() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t N = 16 + static_cast<std::size_t>(u(rng) * 15);
    std::vector<double> v{1.0 + std::floor(5 * u(rng))};
    for (std::size_t k = 1; k < N + 12; ++k)
      v.push_back(std::floor(v.back() * (1.0 + 3.5 * u(rng) * u(rng))) + 1.0);
    LowerOptions o;
    o.B = 1.5 + 2.0 * u(rng);
    o.z_cap = 1e9;
    const double eps = 0.05 + 0.9 * u(rng);
    const auto lc = build_lower(table_from(v), eps, N, o);
    std::vector<double> x = v;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i + 1] / (*o.B + eps) > x[i]) {
          x[i] = x[i + 1] / (*o.B + eps);
          changed = true;
        }
    }
    for (std::size_t i = 0; i <= N; ++i) worst = std::max(worst, std::fabs(lc.log_A[i].log() / x[i] - 1.0));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "20 tables, max relative deviation %.3e", worst);
  return {worst <= 1e-9, buf};
}

// 7
Outcome level_invariance() {
  std::size_t checks = 0, equal = 0;
  for (const auto& psi : {GrowthFunction::geometric(2), GrowthFunction::geometric(3),
                          GrowthFunction::oscillating(2, 3, 5)}) {
    const auto base = predict(psi, 400);
    for (std::uint64_t lambda : {2, 5, 10}) {
      const auto s = predict(psi.scaled(lambda), 400);
      ++checks;
      equal += s.pred_full == base.pred_full && s.pred_upper == base.pred_upper &&
               s.pred_lower == base.pred_lower;
    }
  }
  return {equal == checks, std::to_string(equal) + "/" + std::to_string(checks) + " scaled families identical"};
}

// 8: dip at n = 5 pulls phi below psi, then psi sits on 16 for five steps
Outcome plateau() {
  std::vector<double> v{2, 4, 8, 16, 20, 16, 16, 16, 16, 16};
  for (int k = 0; k < 40; ++k) v.push_back(v.back() * 2);
  const auto uc = build_upper(table_from(v), 0.1, 40);
  std::size_t applicable = 0, zero = 0;
  for (std::size_t n = 1; n < 40; ++n) {
    if (!uc.first_branch[n - 1] || uc.phi_equals_psi[n - 1]) continue;
    ++applicable;
    zero += uc.log_c[n].log() == 0.0;
  }
  return {applicable > 0 && zero == applicable,
          std::to_string(zero) + "/" + std::to_string(applicable) + " applicable indices with L_{n+1} = 0"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args, std::string& out) {
  args.insert(args.begin(), "fastkhin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  return code;
}

// 9
Outcome determinism(const fs::path& dir) {
  fs::create_directories(dir);
  const auto cfg = dir / "oscillating.json";
  std::ofstream(cfg) << nlohmann::json{{"family", "oscillating"},
                                       {"params", {{"b", 2}, {"B", 3}, {"beta", 5}}},
                                       {"N", 400},
                                       {"epsilon", 0.1},
                                       {"seed", 11}}
                            .dump();
  std::vector<std::string> spectra, mcs;
  bool codes_ok = true;
  for (int k = 0; k < 2; ++k) {
    const auto js = dir / ("spectrum" + std::to_string(k) + ".json");
    const auto csv = dir / ("spectrum" + std::to_string(k) + ".csv");
    const auto mc = dir / ("montecarlo" + std::to_string(k) + ".json");
    std::string out;
    codes_ok &= invoke({"spectrum", "--config", cfg.string(), "--out-json", js.string(), "--out-csv",
                        csv.string()},
                       out) == 0;
    spectra.push_back(slurp(js) + slurp(csv) + out);
    codes_ok &= invoke({"montecarlo", "--samples", "200", "--seed", "11", "--threads",
                        std::to_string(k + 1), "--out", mc.string()},
                       out) == 0;
    mcs.push_back(slurp(mc) + out);
  }
  const bool ok = codes_ok && spectra[0] == spectra[1] && mcs[0] == mcs[1] && !spectra[0].empty();
  return {ok, std::string("spectrum ") + (spectra[0] == spectra[1] ? "identical" : "DIFFERS") +
                  ", montecarlo " + (mcs[0] == mcs[1] ? "identical" : "DIFFERS") +
                  (codes_ok ? "" : ", unexpected exit code")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "fastkhin_acceptance";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"interval bound sweep", sweep},
      {"Khintchine constant", khintchine},
      {"upper construction, 2^n", upper_geometric},
      {"lower construction, 3^n", lower_geometric},
      {"distinct spectra, oscillating(2, 3, 5)", distinct_spectra},
      {"minimality of A", minimality},
      {"level invariance", level_invariance},
      {"plateau propagation", plateau},
      {"determinism", [&] { return determinism(dir); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o{false, ""};
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
