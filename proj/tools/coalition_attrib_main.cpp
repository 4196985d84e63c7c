// Copyright 2026 The coalition-attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// coalition-attrib <command> --config <path> [--seed N] [--output <path>]
//                  [--format json|csv|text] [--workers N]

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "coalition_attrib/cli.hpp"

int main(int argc, char** argv) {
  namespace ca = coalition_attrib;
  CLI::App app{"Shapley feature attribution for expression models", "coalition-attrib"};
  std::string command;
  std::string config;
  std::uint64_t seed = 0;
  std::string output;
  std::string format;
  std::size_t workers = 0;
  app.add_option("command", command, "explain | deltas | fairness-screen | compare-modes | validate")
      ->required();
  app.add_option("--config", config, "run configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* output_opt = app.add_option("--output", output, "report path (default: stdout)");
  auto* format_opt = app.add_option("--format", format, "json (default), csv or text")
                         ->check(CLI::IsMember({"json", "csv", "text"}));
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")
                          ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ca::CliOverrides overrides;
  if (*seed_opt) overrides.seed = seed;
  if (*output_opt) overrides.output = output;
  if (*format_opt) overrides.format = ca::parse_output_format(format);
  if (*workers_opt) {
    overrides.workers = workers;
  } else if (const char* env = std::getenv("COALITION_ATTRIB_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n < 1) throw std::invalid_argument("workers");
      overrides.workers = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      std::cerr << ca::error_record(ca::ConfigError(
                       "COALITION_ATTRIB_WORKERS", "expected a positive integer"))
                << "\n";
      return 1;
    }
  }
  return ca::run(command, config, overrides);
}
