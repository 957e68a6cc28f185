// Copyright 2026 The dbp Authors.
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbp/cli/config.hpp"

namespace dbp::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  // validate only: replace the optimal fusion weights by a deliberately wrong
  // rule so the fusion-optimality property must fail.
  bool corrupt_fusion_weights = false;
};

/// Runs one command and returns its exit code. Results go to files under
/// out_dir (CSV) and to `out`; diagnostics go to `err`.
int run_command(std::string_view command, const RunOptions& options, std::ostream& out,
                std::ostream& err);

// The individual commands on an already parsed config. They throw
// ConfigError for configuration problems and dbp::Error for numerical ones;
// run_command maps these onto exit codes.
void analyze(const ConfigFile& config, const RunOptions& options, std::ostream& out);
void simulate(const ConfigFile& config, const RunOptions& options, std::ostream& out);
void rate_search(const ConfigFile& config, const RunOptions& options, std::ostream& out,
                 std::ostream& err);
void volumes(const ConfigFile& config, const RunOptions& options, std::ostream& out);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  bool corrupt_fusion_weights = false;
  std::uint64_t seed = 20260101;
};

/// The invariant suite behind `dbp validate`.
std::vector<PropertyResult> run_validation(const ValidateOptions& options);

/// Prints the pass/fail table; returns true iff every property passed.
bool print_validation(const std::vector<PropertyResult>& results, std::ostream& out);

}  // namespace dbp::cli
