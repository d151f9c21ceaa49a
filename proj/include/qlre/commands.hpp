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


#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qlre/runner.hpp"
#include "qlre/scenarios.hpp"
#include "qlre/validation.hpp"

namespace qlre {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitIntegrationFailure = 2;
inline constexpr int kExitSweepPartial = 3;
inline constexpr int kExitValidationFailed = 4;

struct CommandContext {
  std::ostream& out;
  std::ostream& err;
  RunOptions run;
  int jobs = 1;
};

/// Reads and validates one scenario from a JSON file; throws InvalidArgument.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Parses "1,2,3" or "a:b:step" (inclusive) into numbers.
std::vector<double> parse_values(const std::string& text);

/// Maps an exception from a run to its exit code.
int exit_code_for(const std::exception& e);

int cmd_simulate(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& out_dir,
                 CommandContext& ctx);

/// Runs the sweep with ctx.jobs workers and writes sweep.csv plus per-run
/// artifacts. Rows are ordered by parameter value.
int cmd_sweep(const ScenarioConfig& base, const std::string& parameter, const std::vector<double>& values,
              const std::filesystem::path& out_dir, CommandContext& ctx);

int cmd_validate(ValidationScale scale, CommandContext& ctx);

const std::vector<std::string>& figure_ids();
int cmd_reproduce(const std::string& figure, const std::filesystem::path& out_dir, CommandContext& ctx);

}  // namespace qlre
