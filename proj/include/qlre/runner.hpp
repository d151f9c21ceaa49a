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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlre/dynamics.hpp"
#include "qlre/scenarios.hpp"

namespace qlre {

struct RunOptions {
  /// Lifts the memory cap and the individual-noise spin cap.
  bool force = false;
  /// Refuse runs whose density matrix exceeds this many bytes.
  std::uint64_t max_memory_bytes = 4ULL << 30;
  /// Progress and memory notes; silent when null.
  std::ostream* log = nullptr;
};

/// Cap from QLRE_MAX_MEM_BYTES, else 4 GiB.
std::uint64_t memory_cap_from_env();

struct ObservableSummary {
  std::string name;
  double final_value = 0.0;
  double peak = 0.0;
  double peak_time = 0.0;
  std::optional<double> half_max_time;
};

struct RunResult {
  ScenarioConfig config;
  Backend backend = Backend::Collective;
  Index dimension = 0;
  Trajectory trajectory;
  DensityMatrix final_state;
  /// Frobenius norm of d rho / d tau at the final state.
  double residual = 0.0;
  double elapsed_scaled_time = 0.0;
  double wall_seconds = 0.0;
  std::vector<ObservableSummary> observables;

  const ObservableSummary& observable(const std::string& name) const;
};

/// Validates, checks the memory budget, evolves to t_max and, when the
/// config asks for it, continues to the steady state. The steady point is
/// appended to the trajectory as its last sample.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Shortest round-trip-safe text at 12 significant digits.
std::string format_number(double value);

/// t_scaled then one column per observable. Empty when no observables.
std::string timeseries_csv(const RunResult& result);
nlohmann::json run_summary(const RunResult& result);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// <name>_timeseries.csv (only with observables) and <name>_summary.json.
void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir);

}  // namespace qlre
