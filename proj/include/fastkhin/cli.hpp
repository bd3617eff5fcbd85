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

#ifndef FASTKHIN_CLI_HPP
#define FASTKHIN_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fastkhin/dimension.hpp"
#include "fastkhin/growth.hpp"

namespace fastkhin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailure = 3;

// {"family": ..., "params": {...}, "N": int, "epsilon": real, "prefix": int,
//  "seed": int, "tolerances": {...}}
struct RunConfig {
  std::string family;
  nlohmann::json params = nlohmann::json::object();
  std::size_t N = 60;
  double epsilon = 0.1;
  std::size_t prefix = 4;
  std::uint64_t seed = 0;
  SpectrumTolerances tolerances;
};

// DomainError on schema violations, N < 16, epsilon outside (0, 1), prefix > N.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// geometric {base}, double_exp {scale, power}, table {values},
// oscillating {b, B, beta[, first_node, ramp_ratio]}; optional integer "lambda".
GrowthFunction make_family(const RunConfig& config);

// Writes `content` next to `path` and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json report_json(const DimensionReport& r, const RunConfig& config);
std::string report_csv(const DimensionReport& r, const RunConfig& config);

// Entry point of the fastkhin tool. Exit codes: 0 pass, 2 usage or domain
// error, 3 hypothesis or construction failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastkhin::cli

#endif  // FASTKHIN_CLI_HPP
