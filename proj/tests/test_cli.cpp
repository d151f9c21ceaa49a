// Copyright 2026 The qlre Authors
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


#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qlre/commands.hpp"
#include "qlre/errors.hpp"
#include "qlre/runner.hpp"

using namespace qlre;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("qlre_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

double last_field(const std::string& line, int column) {
  std::stringstream ss(line);
  std::string field;
  for (int i = 0; i <= column; ++i) std::getline(ss, field, ',');
  return std::stod(field);
}

struct Harness {
  std::ostringstream out, err;
  CommandContext ctx{out, err, {}, 1};
};

ScenarioConfig small_chain() {
  ScenarioConfig c = preset("fig3b").front();  // N_B = 2
  c.t_max = 2.0;
  c.sample_dt = 0.1;
  c.run_to_steady = false;
  return c;
}

}  // namespace

TEST_CASE("number formatting uses 12 significant digits") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.5e-11) == "-2.5e-11");
  CHECK(format_number(12.0) == "12");
}

TEST_CASE("value lists") {
  CHECK(parse_values("1,2,3") == std::vector<double>{1, 2, 3});
  CHECK(parse_values("2:12:2") == std::vector<double>{2, 4, 6, 8, 10, 12});
  CHECK(parse_values("0:0.2:0.05").size() == 5);
  CHECK_THROWS_AS(parse_values("1,x"), InvalidArgument);
  CHECK_THROWS_AS(parse_values("3:1:1"), InvalidArgument);
  CHECK_THROWS_AS(parse_values("1:2"), InvalidArgument);
}

TEST_CASE("config hash is stable and sensitive") {
  const ScenarioConfig a = small_chain();
  ScenarioConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.t_max = 2.5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("simulate writes a time series and a summary") {
  TempDir dir;
  Harness h;
  const ScenarioConfig intro = preset("intro-pair").front();
  REQUIRE(cmd_simulate({intro}, dir.path, h.ctx) == kExitOk);
  const auto csv = lines(slurp(dir.path / "intro-pair_timeseries.csv"));
  REQUIRE(csv.size() > 2);
  CHECK(csv.front() == "t_scaled,eof(A,B),concurrence(A,B)");
  CHECK(last_field(csv.back(), 1) == doctest::Approx(0.354).epsilon(0.002 / 0.354));

  const auto summary = nlohmann::json::parse(slurp(dir.path / "intro-pair_summary.json"));
  CHECK(summary["scenario"] == "intro-pair");
  CHECK(summary["config_hash"] == config_hash(intro));
  CHECK(summary["backend"] == "collective");
  CHECK(config_from_json(summary["config"]).name == "intro-pair");
  CHECK(summary["observables"]["eof(A,B)"]["final"].get<double>() == doctest::Approx(0.3546).epsilon(0.001));
  CHECK(summary["steady_state_residual"].get<double>() < 1e-10);
  // No temporaries left behind.
  for (const auto& entry : fs::directory_iterator(dir.path)) CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("simulate reaches 0.315 ebits for the twelve-spin chain") {
  TempDir dir;
  Harness h;
  const auto configs = preset("fig3a");
  REQUIRE(cmd_simulate({configs.back()}, dir.path, h.ctx) == kExitOk);
  const auto csv = lines(slurp(dir.path / (configs.back().name + "_timeseries.csv")));
  CHECK(last_field(csv.back(), 1) == doctest::Approx(0.315).epsilon(0.005 / 0.315));
}

TEST_CASE("no observables means no time series") {
  TempDir dir;
  Harness h;
  ScenarioConfig c = small_chain();
  c.observables.clear();
  REQUIRE(cmd_simulate({c}, dir.path, h.ctx) == kExitOk);
  CHECK(fs::exists(dir.path / (c.name + "_summary.json")));
  CHECK_FALSE(fs::exists(dir.path / (c.name + "_timeseries.csv")));
  CHECK(nlohmann::json::parse(slurp(dir.path / (c.name + "_summary.json")))["observables"].empty());
}

TEST_CASE("identical configs give byte-identical files") {
  TempDir one, two;
  Harness h;
  const ScenarioConfig c = small_chain();
  REQUIRE(cmd_simulate({c}, one.path, h.ctx) == kExitOk);
  REQUIRE(cmd_simulate({c}, two.path, h.ctx) == kExitOk);
  const std::string file = c.name + "_timeseries.csv";
  CHECK(slurp(one.path / file) == slurp(two.path / file));
}

TEST_CASE("exit codes") {
  TempDir dir;
  SUBCASE("invalid config file") {
    std::ofstream(dir.path / "bad.json") << R"({"domains": [{"population": 1}, {"population": 0}]})";
    CHECK_THROWS_WITH_AS(load_config(dir.path / "bad.json"), doctest::Contains("domains[1].population"),
                         InvalidArgument);
    std::ofstream(dir.path / "broken.json") << "{";
    CHECK_THROWS_AS(load_config(dir.path / "broken.json"), InvalidArgument);
    CHECK_THROWS_AS(load_config(dir.path / "missing.json"), InvalidArgument);
  }
  SUBCASE("invalid scenario") {
    Harness h;
    ScenarioConfig c = small_chain();
    c.observables = {"eof(A,Q)"};
    CHECK(cmd_simulate({c}, dir.path, h.ctx) == kExitInvalidConfig);
    CHECK(h.err.str().find("observables[0]") != std::string::npos);
  }
  SUBCASE("steady state not reached") {
    Harness h;
    ScenarioConfig c = small_chain();
    c.t_max = 0.1;
    c.max_time = 0.2;
    c.run_to_steady = true;
    CHECK(cmd_simulate({c}, dir.path, h.ctx) == kExitIntegrationFailure);
  }
  SUBCASE("memory guard") {
    Harness h;
    h.ctx.run.max_memory_bytes = 1000;
    const ScenarioConfig c = small_chain();  // 2 * 3 * 2 states: 2304 bytes
    CHECK(cmd_simulate({c}, dir.path, h.ctx) == kExitInvalidConfig);
    CHECK(h.err.str().find("cap") != std::string::npos);
    h.ctx.run.force = true;
    CHECK(cmd_simulate({c}, dir.path, h.ctx) == kExitOk);
  }
  SUBCASE("error mapping") {
    CHECK(exit_code_for(InvalidArgument("x")) == kExitInvalidConfig);
    CHECK(exit_code_for(UnsupportedConfiguration("x")) == kExitInvalidConfig);
    CHECK(exit_code_for(ConvergenceFailure("x", 1.0)) == kExitIntegrationFailure);
    CHECK(exit_code_for(IntegrationFailure("x", 1.0)) == kExitIntegrationFailure);
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  TempDir serial, parallel;
  Harness a, b;
  b.ctx.jobs = 4;
  ScenarioConfig base = small_chain();
  REQUIRE(cmd_sweep(base, "N_B", {5, 2, 4, 3}, serial.path, a.ctx) == kExitOk);
  REQUIRE(cmd_sweep(base, "N_B", {2, 3, 4, 5}, parallel.path, b.ctx) == kExitOk);
  const std::string csv = slurp(serial.path / "sweep.csv");
  CHECK(csv == slurp(parallel.path / "sweep.csv"));
  const auto rows = lines(csv);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "N_B,status,eof(A,C),eof(A,C)_peak,eof(A,C)_t_half,residual,message");
  CHECK(rows[1].rfind("2,ok,", 0) == 0);
  CHECK(rows[4].rfind("5,ok,", 0) == 0);
}

TEST_CASE("a single-value sweep matches simulate") {
  TempDir sim, sw;
  Harness h;
  ScenarioConfig base = small_chain();
  REQUIRE(cmd_sweep(base, "N_B", {3}, sw.path, h.ctx) == kExitOk);
  ScenarioConfig same = sweep(base, "N_B", {3}).front();
  REQUIRE(cmd_simulate({same}, sim.path, h.ctx) == kExitOk);
  const std::string file = same.name + "_timeseries.csv";
  CHECK(slurp(sim.path / file) == slurp(sw.path / file));
  const auto row = lines(slurp(sw.path / "sweep.csv"))[1];
  CHECK(last_field(row, 2) == last_field(lines(slurp(sim.path / file)).back(), 1));
}

TEST_CASE("failed sweep rows are recorded and the exit code is 3") {
  TempDir dir;
  Harness h;
  h.ctx.run.max_memory_bytes = 16 * 20 * 20;  // room for N_B <= 4
  REQUIRE(cmd_sweep(small_chain(), "N_B", {2, 8}, dir.path, h.ctx) == kExitSweepPartial);
  const auto rows = lines(slurp(dir.path / "sweep.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].rfind("2,ok,", 0) == 0);
  CHECK(rows[2].rfind("8,invalid_config,", 0) == 0);
  CHECK(rows[2].find("cap") != std::string::npos);
}

TEST_CASE("atomic writes replace files whole") {
  TempDir dir;
  write_file_atomic(dir.path / "a.txt", "first");
  write_file_atomic(dir.path / "a.txt", "second");
  CHECK(slurp(dir.path / "a.txt") == "second");
  CHECK_FALSE(fs::exists(dir.path / "a.txt.tmp"));
  write_file_atomic(dir.path / "nested" / "b.txt", "x");
  CHECK(slurp(dir.path / "nested" / "b.txt") == "x");
}

TEST_CASE("validate and reproduce") {
  Harness h;
  CHECK(cmd_validate(ValidationScale::Quick, h.ctx) == kExitOk);
  CHECK(h.out.str().find("oracle.x_formulas") != std::string::npos);
  CHECK(h.out.str().find("FAIL") == std::string::npos);

  TempDir dir;
  Harness r;
  CHECK(cmd_reproduce("fig9", dir.path, r.ctx) == kExitInvalidConfig);
  CHECK(r.err.str().find("fig5a") != std::string::npos);
  REQUIRE(cmd_reproduce("intro", dir.path, r.ctx) == kExitOk);
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  REQUIRE(manifest["files"].size() == 1);
  CHECK(fs::exists(dir.path / manifest["files"][0]["file"].get<std::string>()));
}

TEST_CASE("reproduce writes the inset table for the star") {
  TempDir dir;
  Harness h;
  h.ctx.jobs = 4;
  REQUIRE(cmd_reproduce("fig6", dir.path, h.ctx) == kExitOk);
  const auto rows = lines(slurp(dir.path / "fig6b_inset.csv"));
  REQUIRE(rows.size() == 12);
  double previous = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double value = last_field(rows[i], 1);
    CHECK(value > previous);
    previous = value;
  }
  CHECK(fs::exists(dir.path / "fig6b.csv"));
}
