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

#pragma once

// Config-driven scenario runner behind the command-line tool.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace dissiprep::scenarios {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInvariant = 3;

// Name and one-line description of every scenario.
std::vector<std::pair<std::string, std::string>> list();

// Strict parse: rejects unknown keys and wrong types, fills defaults.
// Throws ConfigError.
Json resolve(const Json& raw);

struct RunResult {
  int exit_code = kExitOk;
  Json manifest;
  std::filesystem::path output_dir;
  std::string message;
};

// Runs a resolved config. The output directory comes from the config unless
// DISSIPREP_OUTPUT_DIR is set.
RunResult run(const Json& resolved);

// Reads, resolves and runs a config file. Validation failures return exit
// code 2 without writing anything.
RunResult run_file(const std::filesystem::path& path);

}  // namespace dissiprep::scenarios
