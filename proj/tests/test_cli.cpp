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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "dissiprep/errors.hpp"
#include "dissiprep/scenarios.hpp"

namespace fs = std::filesystem;
namespace sc = dissiprep::scenarios;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dissiprep_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(DISSIPREP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown key exits 2 without artifacts") {
  const fs::path dir = scratch("unknown");
  const fs::path out = dir / "out";
  const fs::path cfg = write_config(dir, R"({"scenario": "prepare-ground", "bogus": 1, "output": ")" + out.string() + "\"}");
  CHECK(run_binary("run " + cfg.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_binary("validate " + cfg.string()) == 2);
  const fs::path nested = write_config(dir, R"({"scenario": "prepare-ground", "filter": {"widht": 1}})");
  CHECK(run_binary("validate " + nested.string()) == 2);
  const fs::path typed = write_config(dir, R"({"scenario": "prepare-ground", "model": {"n": "three"}})");
  CHECK(run_binary("validate " + typed.string()) == 2);
  const fs::path bad_scenario = write_config(dir, R"({"scenario": "prepare-everything"})");
  CHECK(run_binary("run " + bad_scenario.string()) == 2);
  CHECK(run_binary("list-scenarios") == 0);
}

TEST_CASE("parameter errors exit 2") {
  const fs::path dir = scratch("param");
  const fs::path out = dir / "out";
  const fs::path cfg = write_config(
      dir, R"({"scenario": "prepare-ground", "filter": {"delta": -1}, "output": ")" + out.string() + "\"}");
  CHECK(sc::run_file(cfg).exit_code == sc::kExitValidation);
}

TEST_CASE("prepare-ground reaches the ground state") {
  const fs::path dir = scratch("ground");
  const fs::path out = dir / "out";
  const fs::path cfg = write_config(dir, R"({"scenario": "prepare-ground", "output": ")" + out.string() + "\"}");
  CHECK(run_binary("run " + cfg.string()) == 0);
  const sc::Json manifest = sc::Json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["metrics"]["final_fidelity"].get<double>() >= 0.999);
  CHECK(manifest["config"]["filter"]["delta"].is_number());
  CHECK(fs::exists(out / "evolution.csv"));
}

TEST_CASE("same config and seed give byte-identical CSVs") {
  const fs::path dir = scratch("determinism");
  for (const std::string scenario : {"prepare-ground", "prepare-nonnormal", "error-order"}) {
    const std::string a = (dir / (scenario + "_a")).string();
    const std::string b = (dir / (scenario + "_b")).string();
    const sc::RunResult ra = sc::run(sc::resolve(sc::Json{{"scenario", scenario}, {"output", a}, {"seed", 3}}));
    const sc::RunResult rb = sc::run(sc::resolve(sc::Json{{"scenario", scenario}, {"output", b}, {"seed", 3}}));
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    for (const auto& name : ra.manifest["files"]) {
      const std::string f = name.get<std::string>();
      if (f == "manifest.json") continue;
      CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
    }
  }
}

TEST_CASE("mixing scan edge cases") {
  const fs::path dir = scratch("mixing");
  const sc::RunResult one = sc::run(sc::resolve(
      sc::Json{{"scenario", "mixing-scan"}, {"output", (dir / "one").string()}, {"n_list", {3}}}));
  CHECK(one.manifest["metrics"]["power_law_fit"].is_null());
  CHECK(one.manifest["metrics"]["per_n"].size() == 1);

  const sc::RunResult far = sc::run(sc::resolve(sc::Json{{"scenario", "mixing-scan"},
                                                         {"output", (dir / "far").string()},
                                                         {"n_list", {2, 3}},
                                                         {"probes", {{"eta", 2.0}}}}));
  for (const auto& row : far.manifest["metrics"]["per_n"]) CHECK(row["tau_mix"].get<double>() == 0.0);

  const sc::RunResult guarded = sc::run(sc::resolve(
      sc::Json{{"scenario", "mixing-scan"}, {"output", (dir / "guard").string()}, {"n_list", {2, 7}}}));
  CHECK(guarded.manifest["metrics"]["per_n"].size() == 1);
  CHECK(guarded.manifest["warnings"].size() >= 1);
}

TEST_CASE("invariant violations exit 3") {
  const fs::path dir = scratch("invariant");
  const sc::RunResult r = sc::run(sc::resolve(sc::Json{{"scenario", "prepare-ground"},
                                                       {"output", (dir / "out").string()},
                                                       {"checks", {{"fixed_point_tolerance", 1e-30}}}}));
  CHECK(r.exit_code == sc::kExitInvariant);
  CHECK(r.manifest["status"] == "invariant_violation");
}

TEST_CASE("output directory override") {
  const fs::path dir = scratch("env");
  ::setenv("DISSIPREP_OUTPUT_DIR", (dir / "env_out").string().c_str(), 1);
  const sc::RunResult r = sc::run(sc::resolve(sc::Json{{"scenario", "error-order"}, {"output", (dir / "cfg_out").string()}}));
  ::unsetenv("DISSIPREP_OUTPUT_DIR");
  CHECK(fs::exists(dir / "env_out" / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "cfg_out"));
  CHECK(r.exit_code == 0);
}

}  // TEST_SUITE
