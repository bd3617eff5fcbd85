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

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "fastkhin/cf_core.hpp"
#include "fastkhin/cli.hpp"
#include "fastkhin/constructions.hpp"
#include "fastkhin/errors.hpp"

namespace fastkhin::cli {

using nlohmann::json;

namespace {

// log 2.6854520010...
const double kKhintchineLog = std::log(2.6854520010653064);

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

json jnum(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

json jopt(const std::optional<double>& x) { return x ? jnum(*x) : json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

json config_json(const RunConfig& c) {
  return {{"family", c.family},
          {"params", c.params},
          {"N", c.N},
          {"epsilon", c.epsilon},
          {"prefix", c.prefix},
          {"seed", c.seed},
          {"tolerances",
           {{"estimate", c.tolerances.estimate},
            {"membership", c.tolerances.membership},
            {"invariants", c.tolerances.invariants}}}};
}

std::string provenance_lines(const char* command, const RunConfig& c) {
  std::ostringstream os;
  os << "# fastkhin " << command << "\n# config " << config_json(c).dump() << "\n";
  return os.str();
}

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out) {
  if (path)
    write_atomic(*path, content);
  else
    out << content;
}

// --- expand -----------------------------------------------------------------

int cmd_expand(const std::string& text, std::size_t max_n, std::ostream& out) {
  static const std::regex pattern(R"(\s*(\d+)\s*/\s*(\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw DomainError("expand: expected p/q, got '" + text + "'");
  const BigInt p(m[1].str()), q(m[2].str());
  if (q == 0) throw DomainError("expand: zero denominator");
  const auto digits = expand_rational(p, q, max_n);
  out << "x = " << p << '/' << q << "\n";
  out << "digits:";
  for (std::size_t i = 0; i < digits.size(); ++i) out << ' ' << digits.exact(i);
  out << "\n";
  if (!digits.complete() && !digits.empty()) out << "truncated at " << digits.size() << " digits\n";
  if (digits.empty()) {
    out << "length: 1\n";
    return kExitOk;
  }
  const auto conv = convergents(digits);
  out << "n p_n/q_n |I_n| lower_bound upper_bound\n";
  bool all_ok = true;
  for (std::size_t n = 1; n <= digits.size(); ++n) {
    const auto I = basic_interval(digits.prefix(n));
    all_ok = all_ok && I.lower_bound_holds && I.upper_bound_holds;
    out << n << ' ' << conv[n - 1].p << '/' << conv[n - 1].q << ' ' << rational_string(I.length)
        << ' ' << (I.lower_bound_holds ? "ok" : "FAIL") << ' '
        << (I.upper_bound_holds ? "ok" : "FAIL") << "\n";
  }
  out << "length: " << rational_string(basic_interval(digits).length) << "\n";
  return all_ok ? kExitOk : kExitFailure;
}

// --- spectrum ---------------------------------------------------------------

int cmd_spectrum(const std::string& config_path, const std::optional<std::string>& json_path,
                 const std::optional<std::string>& csv_path, std::ostream& out) {
  const RunConfig c = load_config(config_path);
  const GrowthFunction psi = make_family(c);
  const DimensionReport r = spectrum_report(psi, c.N, c.epsilon, c.tolerances);
  const std::string j = report_json(r, c).dump(2) + "\n";
  const std::string row = report_csv(r, c);
  if (json_path) write_atomic(*json_path, j);
  if (csv_path) write_atomic(*csv_path, row);
  if (!json_path && !csv_path) out << j;
  out << r.params << ": pred (full, upper, lower) = (" << num(r.pred_full) << ", "
      << num(r.pred_upper) << ", " << num(r.pred_lower) << ")";
  if (r.est_upper) out << " est_upper " << num(*r.est_upper);
  if (r.est_lower) out << " est_lower " << num(*r.est_lower);
  out << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  for (const auto& f : r.flags) out << "flag: " << f << "\n";
  return r.pass() ? kExitOk : kExitFailure;
}

// --- montecarlo -------------------------------------------------------------

int cmd_montecarlo(std::size_t samples, std::size_t depth, std::size_t precision,
                   std::uint64_t seed, unsigned threads, const std::optional<std::string>& path,
                   std::ostream& out) {
  if (samples < 1) throw DomainError("montecarlo: samples must be >= 1");
  if (depth < 1) throw DomainError("montecarlo: depth must be >= 1");
  if (precision < 1) throw DomainError("montecarlo: precision must be >= 1");
  const auto s = khintchine_monte_carlo(samples, depth, precision, seed, threads);
  json freq = json::object();
  for (std::size_t d = 0; d < s.digit_frequency.size(); ++d)
    freq[std::to_string(d + 1)] = s.digit_frequency[d];
  const json j = {{"samples", s.samples},
                  {"depth", s.depth},
                  {"precision", s.precision},
                  {"seed", s.seed},
                  {"truncated", s.truncated},
                  {"mean", jnum(s.mean)},
                  {"standard_error", jnum(s.standard_error)},
                  {"reference", kKhintchineLog},
                  {"relative_error", jnum(std::fabs(s.mean / kKhintchineLog - 1.0))},
                  {"digit_frequency", freq}};
  emit(path, j.dump(2) + "\n", out);
  if (path)
    out << "mean " << num(s.mean) << " +- " << num(s.standard_error) << " (reference "
        << num(kKhintchineLog) << ", truncated " << s.truncated << ")\n";
  return kExitOk;
}

// --- construct --------------------------------------------------------------

struct TraceRow {
  std::string log_c, alpha, log_s, branch, log_A, t, lo, hi;
};

std::string trace_csv(const std::string& head, const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os << head << "n,log_c,alpha,log_s,branch,log_A,t,window_lo,window_hi\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << i + 1 << ',' << r.log_c << ',' << r.alpha << ',' << r.log_s << ',' << r.branch << ','
       << r.log_A << ',' << r.t << ',' << r.lo << ',' << r.hi << "\n";
  }
  return os.str();
}

json membership_json(const MembershipDiagnostics& m) {
  return {{"tail_max", jnum(m.tail_max)}, {"tail_min", jnum(m.tail_min)}, {"pass", m.pass}};
}

int construct_upper(const RunConfig& c, const GrowthFunction& psi, std::string& trace, json& diag) {
  const auto uc = build_upper(psi, c.epsilon, c.N);
  UpperTolerances ut;
  ut.membership = c.tolerances.membership;
  const auto d = verify_upper(uc, psi, ut);
  const auto cc = cross_check_upper(uc, c.tolerances.estimate);
  const auto windows = uc.windows();
  const auto pt = synthesize_point(windows, c.prefix, Provenance::upper);
  const auto mem = verify_membership(pt, psi, MembershipTarget::upper, c.tolerances.membership);
  const bool digits_ok = digits_in_windows(pt);

  std::vector<TraceRow> rows(c.N);
  for (std::size_t i = 0; i < c.N; ++i) {
    rows[i] = {num(uc.log_c[i].log()), std::to_string(uc.alpha[i]), num(uc.log_s[i].log()),
               uc.first_branch[i] ? "1" : "2", "", "", num(windows[i].lo), num(windows[i].hi)};
  }
  trace = trace_csv(provenance_lines("construct upper", c), rows);
  json staircase = uc.staircase;
  json hits = uc.first_branch_positions();
  diag = {{"which", "upper"},
          {"b", jnum(uc.b)},
          {"epsilon", uc.epsilon},
          {"sum_c_ratio_max", jnum(d.sum_c_ratio_max)},
          {"sum_s_ratio_max", jnum(d.sum_s_ratio_max)},
          {"growth_ratio_max", jnum(d.growth_ratio_max)},
          {"growth_bound", jnum(uc.b - 1.0 + uc.epsilon)},
          {"alpha_sum_ratio_max", jnum(d.alpha_sum_ratio_max)},
          {"alpha_growth_ratio_max", jnum(d.alpha_growth_ratio_max)},
          {"first_branch_hits", d.first_branch_hits},
          {"first_branch_positions", hits},
          {"staircase", staircase},
          {"phi_certified", uc.phi_certified},
          {"flww", {{"value", jnum(cc.flww.value)}, {"lo", jnum(cc.flww.lo)}, {"hi", jnum(cc.flww.hi)}}},
          {"target_eps", jnum(cc.target_eps)},
          {"target", jnum(cc.target)},
          {"flww_in_band", cc.in_band},
          {"point_membership", membership_json(mem)},
          {"digits_in_windows", digits_ok},
          {"verify_pass", d.pass}};
  const bool pass = d.pass && mem.pass && digits_ok;
  diag["pass"] = pass;
  return pass ? kExitOk : kExitFailure;
}

int construct_lower(const RunConfig& c, const GrowthFunction& psi, std::string& trace, json& diag) {
  const auto lc = build_lower(psi, c.epsilon, c.N);
  LowerTolerances lt;
  lt.membership = c.tolerances.membership;
  const auto d = verify_lower(lc, psi, lt);
  const auto md = mass_distribution(lc);
  const std::span<const LogWindow> first_n(lc.windows.data(), c.N);
  const auto pt = synthesize_point(first_n, c.prefix, Provenance::lower);
  const auto mem = verify_membership(pt, psi, MembershipTarget::lower, c.tolerances.membership);
  const bool digits_ok = digits_in_windows(pt);

  std::vector<TraceRow> rows(c.N + 1);
  for (std::size_t i = 0; i <= c.N; ++i) {
    rows[i] = {"", "", "", "", num(lc.log_A[i].log()), std::to_string(lc.t[i]),
               num(lc.windows[i].lo), num(lc.windows[i].hi)};
  }
  trace = trace_csv(provenance_lines("construct lower", c), rows);
  diag = {{"which", "lower"},
          {"B", jnum(lc.B)},
          {"epsilon", lc.epsilon},
          {"Z_est", jnum(lc.Z_est)},
          {"i0", lc.i0},
          {"sup_certified", lc.sup_certified},
          {"ell", lc.ell},
          {"growth_ok", d.growth_ok},
          {"floor_ok", d.floor_ok},
          {"block_bound_ok", d.block_bound_ok},
          {"plateau_ok", d.plateau_ok},
          {"ell_ok", d.ell_ok},
          {"z_ok", d.z_ok},
          {"membership_ok", d.membership_ok},
          {"block_ratio_max", jnum(d.block_ratio_max)},
          {"membership_ratio_min", jnum(d.membership_ratio_min)},
          {"perturbation_ratio", jnum(d.perturbation_ratio)},
          {"eps_log_ratio", jnum(d.eps_log_ratio)},
          {"d_liminf", {{"lo", jnum(md.d_liminf.lo)}, {"hi", jnum(md.d_liminf.hi)}}},
          {"d_target", jnum(md.target)},
          {"mu_bound_ratio_min", jnum(md.mu_bound_ratio_min)},
          {"point_membership", membership_json(mem)},
          {"digits_in_windows", digits_ok},
          {"verify_pass", d.pass}};
  const bool pass = d.pass && mem.pass && digits_ok;
  diag["pass"] = pass;
  return pass ? kExitOk : kExitFailure;
}

int construct_luczak(double a, double base, std::size_t horizon, std::string& trace, json& diag) {
  const auto pt = luczak_witness(a, base, horizon);
  std::vector<TraceRow> rows(horizon);
  std::vector<LogReal> log_s;
  for (std::size_t i = 0; i < horizon; ++i) {
    const double v = pt.digits.log_digit(i);
    rows[i] = {"", "", num(v), "", "", "", num(pt.windows[i].lo), num(pt.windows[i].hi)};
    log_s.push_back(LogReal::from_log(v));
  }
  std::ostringstream head;
  head << "# fastkhin construct luczak\n# a=" << num(a) << " base=" << num(base)
       << " horizon=" << horizon << "\n";
  trace = trace_csv(head.str(), rows);
  diag = {{"which", "luczak"}, {"a", a}, {"base", base}, {"horizon", horizon}};
  if (horizon >= 8) {
    const auto f = flww_dim(log_s);
    diag["flww"] = {{"value", jnum(f.value)}, {"lo", jnum(f.lo)}, {"hi", jnum(f.hi)}};
    diag["target"] = jnum(1.0 / (1.0 + base));
  }
  diag["pass"] = true;
  return kExitOk;
}

int cmd_construct(const std::optional<std::string>& config_path, const std::string& which,
                  double a, double base, std::size_t horizon, const std::string& out_path,
                  const std::optional<std::string>& diag_path, std::ostream& out) {
  std::string trace;
  json diag;
  int code;
  if (which == "luczak") {
    code = construct_luczak(a, base, horizon, trace, diag);
  } else {
    if (!config_path) throw DomainError("construct: --config is required for " + which);
    const RunConfig c = load_config(*config_path);
    const GrowthFunction psi = make_family(c);
    code = which == "upper" ? construct_upper(c, psi, trace, diag)
                            : construct_lower(c, psi, trace, diag);
  }
  write_atomic(out_path, trace);
  const std::string d = diag.dump(2) + "\n";
  if (diag_path)
    write_atomic(*diag_path, d);
  else
    out << d;
  out << which << (code == kExitOk ? ": pass" : ": FAIL") << "\n";
  return code;
}

}  // namespace

json report_json(const DimensionReport& r, const RunConfig& c) {
  json declared = nullptr;
  if (r.declared)
    declared = {{"b", jnum(r.declared->b)}, {"B", jnum(r.declared->B)}, {"beta", jnum(r.declared->beta)}};
  return {{"config", config_json(c)},
          {"family", r.family},
          {"params", r.params},
          {"N", r.horizon},
          {"estimated",
           {{"b", jnum(r.estimated.b_est)},
            {"B", jnum(r.estimated.B_est)},
            {"beta", jnum(r.estimated.beta_est)},
            {"window", {r.estimated.window_lo, r.estimated.window_hi}},
            {"growth_exponent", jnum(r.estimated.growth_exponent)},
            {"subexponential", r.estimated.subexponential}}},
          {"declared", declared},
          {"used", {{"b", jnum(r.b)}, {"B", jnum(r.B)}, {"beta", jnum(r.beta)}}},
          {"predicted",
           {{"full", jnum(r.pred_full)}, {"upper", jnum(r.pred_upper)}, {"lower", jnum(r.pred_lower)}}},
          {"estimates", {{"upper", jopt(r.est_upper)}, {"lower", jopt(r.est_lower)}}},
          {"hypothesis_note", r.hypothesis_note},
          {"out_of_hypothesis", r.out_of_hypothesis},
          {"envelope_ratio", jnum(r.envelope_ratio)},
          {"flags", r.flags},
          {"warnings", r.warnings},
          {"pass", r.pass()}};
}

std::string report_csv(const DimensionReport& r, const RunConfig& c) {
  std::ostringstream os;
  os << provenance_lines("spectrum", c);
  os << "family,params,N,b,B,beta,pred_full,pred_upper,pred_lower,est_upper,est_lower,flags\n";
  auto opt = [](const std::optional<double>& x) { return x ? num(*x) : std::string(); };
  os << csv_field(r.family) << ',' << csv_field(r.params) << ',' << r.horizon << ',' << num(r.b)
     << ',' << num(r.B) << ',' << num(r.beta) << ',' << num(r.pred_full) << ','
     << num(r.pred_upper) << ',' << num(r.pred_lower) << ',' << opt(r.est_upper) << ','
     << opt(r.est_lower) << ',' << csv_field(join(r.flags, ";")) << "\n";
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fastkhin: fast Khintchine spectra laboratory"};
  app.require_subcommand(1);

  std::string rational;
  std::size_t max_n = 64;
  auto* expand = app.add_subcommand("expand", "continued fraction of p/q with interval checks");
  expand->add_option("rational", rational, "p/q")->required();
  expand->add_option("--max-n", max_n, "digit limit");

  std::string config;
  std::optional<std::string> out_json, out_csv;
  auto* spectrum = app.add_subcommand("spectrum", "invariants, predictions and estimates");
  spectrum->add_option("--config", config, "run config (JSON)")->required();
  spectrum->add_option("--out-json", out_json, "JSON report");
  spectrum->add_option("--out-csv", out_csv, "CSV report row");

  std::size_t samples = 1000, depth = 100, precision = 300;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<std::string> mc_out;
  auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo Khintchine averages");
  mc->add_option("--samples", samples);
  mc->add_option("--depth", depth);
  mc->add_option("--precision", precision, "decimal digits of the sample grid");
  mc->add_option("--seed", seed);
  mc->add_option("--threads", threads)->check(CLI::Range(1u, 256u));
  mc->add_option("--out", mc_out, "summary JSON (stdout when absent)");

  std::optional<std::string> c_config, diag;
  std::string which, trace_out;
  double a = std::numbers::e, base = 2.0;
  std::size_t horizon = 10;
  auto* construct = app.add_subcommand("construct", "run one construction and write its trace");
  construct->add_option("--config", c_config, "run config (JSON)");
  construct->add_option("--which", which)->required()->check(CLI::IsMember({"upper", "lower", "luczak"}));
  construct->add_option("--a", a, "luczak: a > 1");
  construct->add_option("--base", base, "luczak: base > 1");
  construct->add_option("--horizon", horizon, "luczak: number of digits");
  construct->add_option("--out", trace_out, "trace CSV")->required();
  construct->add_option("--diag", diag, "diagnostics JSON (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (expand->parsed()) return cmd_expand(rational, max_n, out);
    if (spectrum->parsed()) return cmd_spectrum(config, out_json, out_csv, out);
    if (mc->parsed()) return cmd_montecarlo(samples, depth, precision, seed, threads, mc_out, out);
    if (construct->parsed())
      return cmd_construct(c_config, which, a, base, horizon, trace_out, diag, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FamilyDefinitionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedModeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fastkhin::cli
