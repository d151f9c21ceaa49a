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


// qlre: command-line front end for the reservoir-entanglement simulator.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qlre/commands.hpp"
#include "qlre/errors.hpp"

namespace {

std::vector<qlre::ScenarioConfig> load_inputs(const std::string& config_path, const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty())
    throw qlre::InvalidArgument("--config and --preset are mutually exclusive");
  if (!config_path.empty()) return {qlre::load_config(config_path)};
  if (!preset_name.empty()) return qlre::preset(preset_name);
  throw qlre::InvalidArgument("one of --config or --preset is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement generation between spin domains through shared dissipative reservoirs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir = ".";
  std::string parameter;
  std::string values;
  std::string scale = "quick";
  std::string figure;
  int jobs = 1;
  bool force = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::Range(1, 1024))->capture_default_str();
    cmd->add_flag("--force", force, "Ignore the memory cap and the individual-noise spin cap");
    cmd->add_flag("--quiet", quiet, "No progress notes on stderr");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one config file or every run of a preset");
  simulate->add_option("--config", config_path, "Scenario JSON file");
  simulate->add_option("--preset", preset_name, "Built-in preset name");
  add_common(simulate);

  auto* sweep_cmd = app.add_subcommand("sweep", "Vary one parameter of a scenario");
  sweep_cmd->add_option("--config", config_path, "Base scenario JSON file");
  sweep_cmd->add_option("--preset", preset_name, "Built-in preset (its first run is the base)");
  sweep_cmd->add_option("--param", parameter, "Parameter name")
      ->required()
      ->check(CLI::IsMember(qlre::kSweepParameters));
  sweep_cmd->add_option("--values", values, "Comma list or start:stop:step")->required();
  add_common(sweep_cmd);

  auto* reproduce = app.add_subcommand("reproduce", "Write the curves behind one figure");
  reproduce->add_option("figure", figure, "Figure id")->required();
  add_common(reproduce);

  auto* validate = app.add_subcommand("validate", "Run the oracle validation suite");
  validate->add_option("--scale", scale, "quick caps N_B at 5, full at 8")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();

  auto* presets = app.add_subcommand("presets", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors count as invalid configuration; --help exits cleanly.
    return app.exit(e) == 0 ? qlre::kExitOk : qlre::kExitInvalidConfig;
  }

  qlre::CommandContext ctx{std::cout, std::cerr, {}, jobs};
  ctx.run.force = force;
  ctx.run.max_memory_bytes = qlre::memory_cap_from_env();
  ctx.run.log = quiet ? nullptr : &std::cerr;

  try {
    if (*presets) {
      for (const auto& name : qlre::preset_names()) std::cout << name << "\n";
      return qlre::kExitOk;
    }
    if (*validate)
      return qlre::cmd_validate(scale == "full" ? qlre::ValidationScale::Full : qlre::ValidationScale::Quick, ctx);

    std::filesystem::create_directories(out_dir);
    if (*reproduce) return qlre::cmd_reproduce(figure, out_dir, ctx);
    const auto configs = load_inputs(config_path, preset_name);
    if (*simulate) return qlre::cmd_simulate(configs, out_dir, ctx);
    return qlre::cmd_sweep(configs.front(), parameter, qlre::parse_values(values), out_dir, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qlre::exit_code_for(e);
  }
}
