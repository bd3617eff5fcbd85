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

#include <fstream>
#include <sstream>

#include "fastkhin/cli.hpp"
#include "fastkhin/errors.hpp"

namespace fastkhin::cli {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number())
    throw DomainError(std::string("config: params.") + key + " must be a number");
  return obj.at(key).get<double>();
}

template <typename T>
T read_unsigned(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw DomainError(std::string("config: ") + key + " must be a nonnegative integer");
  return static_cast<T>(v.get<unsigned long long>());
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw DomainError("config: top level must be an object");
  static const char* known[] = {"family", "params", "N", "epsilon", "prefix", "seed", "tolerances"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw DomainError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  if (!j.contains("family") || !j.at("family").is_string())
    throw DomainError("config: 'family' is required");
  c.family = j.at("family").get<std::string>();
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw DomainError("config: 'params' must be an object");
    c.params = j.at("params");
  }
  c.N = read_unsigned<std::size_t>(j, "N", c.N);
  c.prefix = read_unsigned<std::size_t>(j, "prefix", c.prefix);
  c.seed = read_unsigned<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("epsilon")) {
    if (!j.at("epsilon").is_number()) throw DomainError("config: 'epsilon' must be a number");
    c.epsilon = j.at("epsilon").get<double>();
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw DomainError("config: 'tolerances' must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!value.is_number() || !(value.get<double>() > 0.0))
        throw DomainError("config: tolerance '" + key + "' must be a positive number");
      if (key == "estimate")
        c.tolerances.estimate = value.get<double>();
      else if (key == "membership")
        c.tolerances.membership = value.get<double>();
      else if (key == "invariants")
        c.tolerances.invariants = value.get<double>();
      else
        throw DomainError("config: unknown tolerance '" + key + "'");
    }
  }
  if (c.N < 16) throw DomainError("config: N must be >= 16");
  if (!(c.epsilon > 0.0) || !(c.epsilon < 1.0)) throw DomainError("config: epsilon must lie in (0, 1)");
  if (c.prefix > c.N) throw DomainError("config: prefix must not exceed N");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

GrowthFunction make_family(const RunConfig& c) {
  const json& p = c.params;
  GrowthFunction psi = [&] {
    if (c.family == "geometric") return GrowthFunction::geometric(number(p, "base"));
    if (c.family == "double_exp")
      return GrowthFunction::double_exponential(number(p, "scale"), number(p, "power"));
    if (c.family == "oscillating") {
      OscillatingShape shape;
      shape.first_node = read_unsigned<std::size_t>(p, "first_node", shape.first_node);
      if (p.contains("ramp_ratio")) shape.ramp_ratio = number(p, "ramp_ratio");
      return GrowthFunction::oscillating(number(p, "b"), number(p, "B"), number(p, "beta"), shape);
    }
    if (c.family == "table") {
      if (!p.contains("values") || !p.at("values").is_array() || p.at("values").empty())
        throw DomainError("config: params.values must be a nonempty array");
      std::vector<BigInt> values;
      for (const json& v : p.at("values")) {
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
          values.emplace_back(v.get<unsigned long long>());
        } else if (v.is_string()) {
          const auto& s = v.get_ref<const std::string&>();
          if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("config: table value '" + s + "' is not a decimal integer");
          values.emplace_back(s);
        } else {
          throw DomainError("config: table values must be integers or decimal strings");
        }
      }
      return GrowthFunction::table(std::move(values));
    }
    throw DomainError("config: unknown family '" + c.family + "'");
  }();
  if (p.contains("lambda")) {
    const auto lambda = read_unsigned<std::uint64_t>(p, "lambda", 1);
    if (lambda < 1) throw DomainError("config: lambda must be >= 1");
    psi = psi.scaled(lambda);
  }
  return psi;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DomainError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fastkhin::cli
