// Copyright 2026 The dissiprep Authors
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
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dissiprep/errors.hpp"
#include "dissiprep/scenarios.hpp"

namespace sc = dissiprep::scenarios;

int main(int argc, char** argv) {
  CLI::App app{"Dissipative state preparation experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DISSIPREP_VERSION));

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
  run->add_option("config", run_path, "Config file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Resolve a config and print it with defaults filled");
  validate->add_option("config", validate_path, "Config file")->required();

  auto* list = app.add_subcommand("list-scenarios", "List available scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::kExitValidation;
  }

  if (*list) {
    for (const auto& [name, description] : sc::list()) std::cout << name << "  " << description << '\n';
    return sc::kExitOk;
  }
  if (*validate) {
    try {
      std::ifstream in(validate_path);
      if (!in) throw dissiprep::ConfigError("cannot read config file " + validate_path);
      sc::Json raw;
      try {
        raw = sc::Json::parse(in);
      } catch (const sc::Json::parse_error& e) {
        throw dissiprep::ConfigError(std::string("malformed JSON: ") + e.what());
      }
      std::cout << sc::resolve(raw).dump(2) << '\n';
      return sc::kExitOk;
    } catch (const dissiprep::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return sc::kExitValidation;
    }
  }
  const sc::RunResult result = sc::run_file(run_path);
  if (result.exit_code != sc::kExitOk) {
    std::cerr << "error: " << result.message << '\n';
  } else {
    std::cout << "wrote " << (result.output_dir / "manifest.json").string() << '\n';
  }
  return result.exit_code;
}
