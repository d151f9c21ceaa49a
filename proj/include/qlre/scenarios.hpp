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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qlre/dynamics.hpp"
#include "qlre/hilbert.hpp"

namespace qlre {

/// Initial state of one domain.
struct DomainInitial {
  enum class Kind { Ground, Excited, Dicke, Mixed };
  Kind kind = Kind::Ground;
  int excitations = 0;  // Dicke only
  // Mixed only: a |up..up><up..up| + b I, with the identity on the full
  // 2^N space or on the N+1 symmetric levels depending on mixed_basis.
  double a = 1.0;
  double b = 0.0;

  static DomainInitial ground() { return {}; }
  static DomainInitial excited() { return {Kind::Excited}; }
  static DomainInitial dicke(int k) { return {Kind::Dicke, k}; }
  static DomainInitial mixed(double a, double b) { return {Kind::Mixed, 0, a, b}; }
};

struct DomainSpec {
  std::string name;
  int population = 1;
  DomainInitial initial;
};

struct ReservoirSpec {
  std::vector<int> domains;
  double rate = 1.0;  // multiple of gamma
};

struct TemperatureSpec {
  double kelvin = 0.0;
  double omega0_over_2pi_hz = 10e9;
};

enum class BackendChoice { Auto, Collective, Full };
enum class MixedBasis { Full, Symmetric };

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<DomainSpec> domains;
  std::vector<ReservoirSpec> reservoirs;
  /// Thermal occupation. Ignored when a temperature block is present.
  double nbar = 0.0;
  std::optional<TemperatureSpec> temperature;
  bool include_individual = false;
  double gamma_dep_over_gamma = 0.0;
  BackendChoice backend = BackendChoice::Auto;
  MixedBasis mixed_basis = MixedBasis::Full;
  double t_max = 10.0;
  double sample_dt = 0.05;
  std::vector<std::string> observables;
  /// Continue past t_max until the residual drops below steady_tol.
  bool run_to_steady = false;
  double steady_tol = 1e-10;
  double max_time = 200.0;
};

/// 1 / (exp(hbar omega0 / k_B T) - 1) with CODATA hbar and k_B; 0 at T = 0.
double bose_einstein_nbar(double omega0_over_2pi_hz, double kelvin);

/// nbar from the temperature block when present, else the explicit value.
double effective_nbar(const ScenarioConfig& config);

/// Default spin cap for runs with individual noise.
inline constexpr int kIndividualSpinCap = 13;

/// Throws InvalidArgument naming the offending field. With allow_large the
/// individual-noise spin cap is lifted.
void validate(const ScenarioConfig& config, bool allow_large = false);

/// Collective unless individual noise, dephasing or a full-space mixed
/// preparation needs the Full backend. An explicit Collective choice that
/// cannot represent the scenario throws UnsupportedConfiguration.
Backend resolve_backend(const ScenarioConfig& config);

BasisDescriptor scenario_basis(const ScenarioConfig& config);

/// Size of one dense density matrix, 16 bytes per complex entry.
std::uint64_t density_matrix_bytes(const ScenarioConfig& config);

int domain_index(const ScenarioConfig& config, std::string_view name);

DensityMatrix build_initial_state(const ScenarioConfig& config);
MasterEquation build_equation(const ScenarioConfig& config);

/// Observable names:
///   eof(A,C)  concurrence(A,C)  jz_norm(B)  log_negativity(A|B)
///   negativity(A|B,C)  tripartite_negativity(A,B,C)  dark_state_weight
/// dark_state_weight needs a (1, N, 1) layout.
Observable make_observable(const ScenarioConfig& config, const std::string& spec);

const std::vector<std::string>& preset_names();
/// Throws InvalidArgument listing the valid names.
std::vector<ScenarioConfig> preset(const std::string& name);

inline const std::vector<std::string> kSweepParameters = {"N_B", "T", "gamma_dep_over_gamma", "F_0", "N_D"};

/// One config per value with `parameter` replaced.
std::vector<ScenarioConfig> sweep(const ScenarioConfig& base, const std::string& parameter,
                                  const std::vector<double>& values);

/// Mixed-preparation weights for a target fidelity F_0 = a + b.
std::pair<double, double> mixed_weights(double fidelity, int population, MixedBasis basis);

// JSON schema mirroring ScenarioConfig; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace qlre
