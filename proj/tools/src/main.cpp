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


#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dbp/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized feedforward equalization for the massive MU-MIMO uplink"};
  app.require_subcommand(1);

  dbp::cli::RunOptions options;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config,-c", config, "Config file (INI-style sections)");
    if (config_required) c->required();
    sub->add_option("--out,-o", out_dir, "Output directory for CSV files");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--workers", workers, "Worker threads (0 = available parallelism)")
        ->check(CLI::NonNegativeNumber);
  };

  add_common(app.add_subcommand("analyze", "Asymptotic SINR over a (beta, Es/N0) grid"), true);
  add_common(app.add_subcommand("simulate", "Monte Carlo SER against the analytic prediction"),
             true);
  add_common(app.add_subcommand("rate-search", "Minimum BS-to-UE antenna ratio versus SNR loss"),
             true);
  add_common(app.add_subcommand("volumes", "Fusion message volumes per architecture"), false);
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  add_common(validate, false);
  validate->add_flag("--corrupt-fusion-weights", options.corrupt_fusion_weights)
      ->group("");  // hidden negative-control hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dbp::cli::kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  if (!config.empty()) options.config = config;
  options.out_dir = out_dir;
  if (sub->count("--seed")) options.seed = seed;
  if (sub->count("--workers")) options.workers = workers;
  return dbp::cli::run_command(sub->get_name(), options, std::cout, std::cerr);
}
