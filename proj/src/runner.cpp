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


#include "qlre/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "qlre/errors.hpp"

namespace qlre {

std::uint64_t memory_cap_from_env() {
  const char* raw = std::getenv("QLRE_MAX_MEM_BYTES");
  if (raw == nullptr || *raw == '\0') return 4ULL << 30;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') throw InvalidArgument("QLRE_MAX_MEM_BYTES must be a byte count");
  return value;
}

const ObservableSummary& RunResult::observable(const std::string& name) const {
  for (const auto& o : observables)
    if (o.name == name) return o;
  throw InvalidArgument("run has no observable named '" + name + "'");
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate(config, options.force);

  const std::uint64_t bytes = density_matrix_bytes(config);
  if (options.log)
    *options.log << config.name << ": backend " << to_string(resolve_backend(config)) << ", density matrix "
                 << bytes << " bytes\n";
  if (bytes > options.max_memory_bytes && !options.force)
    throw InvalidArgument("domains: density matrix needs " + std::to_string(bytes) + " bytes, above the cap of " +
                          std::to_string(options.max_memory_bytes) + " (raise QLRE_MAX_MEM_BYTES or use --force)");

  const MasterEquation eq = build_equation(config);
  const DensityMatrix rho0 = build_initial_state(config);
  EvolveOptions evolve_options;
  for (const auto& name : config.observables) evolve_options.observables.push_back(make_observable(config, name));

  Trajectory trajectory = evolve(eq, rho0, config.t_max, config.sample_dt, evolve_options);
  DensityMatrix final_state = *trajectory.final_state;
  double residual = lindblad_rhs(eq, final_state).norm();
  double elapsed = config.t_max;

  if (config.run_to_steady && residual >= config.steady_tol) {
    SteadyStateOptions steady;
    steady.tol = config.steady_tol;
    steady.max_time = config.max_time - config.t_max;
    const SteadyStateResult result = steady_state(eq, final_state, steady);
    final_state = result.rho;
    residual = result.residual;
    elapsed += result.elapsed_scaled_time;
    trajectory.times.push_back(elapsed);
    for (std::size_t i = 0; i < evolve_options.observables.size(); ++i)
      trajectory.observables[i].second.push_back(evolve_options.observables[i].evaluate(final_state));
    trajectory.final_state = final_state;
  }

  RunResult out{config, eq.basis().backend(), eq.basis().dim(), std::move(trajectory), final_state, residual, elapsed,
                0.0, {}};
  for (const auto& [name, series] : out.trajectory.observables) {
    ObservableSummary s;
    s.name = name;
    s.final_value = series.back();
    std::size_t best = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
      if (series[i] > series[best]) best = i;
    s.peak = series[best];
    s.peak_time = out.trajectory.times[best];
    if (s.peak > 0.0) s.half_max_time = half_max_time(series, out.trajectory.times);
    out.observables.push_back(std::move(s));
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string timeseries_csv(const RunResult& result) {
  const auto& traj = result.trajectory;
  if (traj.observables.empty()) return {};
  std::string out = "t_scaled";
  for (const auto& [name, series] : traj.observables) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_number(traj.times[i]);
    for (const auto& [name, series] : traj.observables) out += "," + format_number(series[i]);
    out += "\n";
  }
  return out;
}

nlohmann::json run_summary(const RunResult& result) {
  nlohmann::json observables = nlohmann::json::object();
  for (const auto& o : result.observables) {
    observables[o.name] = {{"final", o.final_value}, {"peak", o.peak}, {"peak_time", o.peak_time}};
    observables[o.name]["half_max_time"] = o.half_max_time ? nlohmann::json(*o.half_max_time) : nlohmann::json();
  }
  const auto& stats = result.trajectory.stats;
  return {{"scenario", result.config.name},
          {"config_hash", config_hash(result.config)},
          {"backend", std::string(to_string(result.backend))},
          {"dimension", result.dimension},
          {"density_matrix_bytes", density_matrix_bytes(result.config)},
          {"steady_state_residual", result.residual},
          {"elapsed_scaled_time", result.elapsed_scaled_time},
          {"wall_seconds", result.wall_seconds},
          {"observables", observables},
          {"integrator",
           {{"accepted_steps", stats.accepted},
            {"rejected_steps", stats.rejected},
            {"rhs_evaluations", stats.rhs_evaluations},
            {"worst_trace_drift", stats.worst_trace_drift}}},
          {"config", config_to_json(result.config)}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir) {
  const std::string csv = timeseries_csv(result);
  if (!csv.empty()) write_file_atomic(dir / (result.config.name + "_timeseries.csv"), csv);
  write_file_atomic(dir / (result.config.name + "_summary.json"), run_summary(result).dump(2) + "\n");
}

}  // namespace qlre
