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


#include "qlre/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include "qlre/entanglement.hpp"
#include "qlre/errors.hpp"
#include "qlre/oracle.hpp"

namespace qlre {

namespace fs = std::filesystem;

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  ScenarioConfig config = config_from_json(j);
  // The spin cap waits for run time, where --force is known.
  validate(config, true);
  return config;
}

std::vector<double> parse_values(const std::string& text) {
  auto number = [&](const std::string& token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size() || !std::isfinite(v))
      throw InvalidArgument("values: '" + token + "' is not a number");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ':')) parts.push_back(number(token));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw InvalidArgument("values: ranges are start:stop:step with step > 0");
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
  }
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(number(token));
  if (out.empty()) throw InvalidArgument("values: empty list");
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const UnsupportedConfiguration*>(&e))
    return kExitInvalidConfig;
  return kExitIntegrationFailure;
}

namespace {

using Outcome = std::variant<RunResult, std::string>;

struct Completed {
  std::vector<Outcome> outcomes;
  std::vector<int> codes;  // 0 on success
};

// Runs every config with up to `jobs` workers; results keep input order.
Completed run_all(const std::vector<ScenarioConfig>& configs, CommandContext& ctx) {
  Completed done;
  done.outcomes.resize(configs.size(), std::string());
  done.codes.assign(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const bool progress = ctx.run.log != nullptr;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        done.outcomes[i] = run_scenario(configs[i], ctx.run);
        if (!progress) continue;
        std::lock_guard lock(log_mutex);
        ctx.err << "done " << configs[i].name << "\n";
      } catch (const std::exception& e) {
        done.outcomes[i] = std::string(e.what());
        done.codes[i] = exit_code_for(e);
        std::lock_guard lock(log_mutex);
        ctx.err << "error in " << configs[i].name << ": " << e.what() << "\n";
      }
    }
  };
  // Per-run notes from concurrent workers would interleave.
  std::ostream* log = ctx.run.log;
  if (ctx.jobs > 1) ctx.run.log = nullptr;
  const int jobs = std::max(1, std::min<int>(ctx.jobs, static_cast<int>(configs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  ctx.run.log = log;
  return done;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

const char* status_for(int code) {
  switch (code) {
    case 0:
      return "ok";
    case kExitInvalidConfig:
      return "invalid_config";
    default:
      return "integration_failure";
  }
}

}  // namespace

int cmd_simulate(const std::vector<ScenarioConfig>& configs, const fs::path& out_dir, CommandContext& ctx) {
  const Completed done = run_all(configs, ctx);
  int code = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (done.codes[i] != 0) {
      ctx.err << configs[i].name << ": " << std::get<std::string>(done.outcomes[i]) << "\n";
      code = std::max(code, done.codes[i]);
      continue;
    }
    const auto& result = std::get<RunResult>(done.outcomes[i]);
    write_run_artifacts(result, out_dir);
    ctx.out << result.config.name << ": backend " << to_string(result.backend) << ", residual "
            << format_number(result.residual) << ", " << std::fixed << std::setprecision(2) << result.wall_seconds
            << " s" << std::defaultfloat << "\n";
    for (const auto& o : result.observables)
      ctx.out << "  " << o.name << " final " << format_number(o.final_value) << " peak " << format_number(o.peak)
              << "\n";
  }
  // Invalid configs outrank integration failures.
  for (int c : done.codes)
    if (c == kExitInvalidConfig) return kExitInvalidConfig;
  return code;
}

int cmd_sweep(const ScenarioConfig& base, const std::string& parameter, const std::vector<double>& values,
              const fs::path& out_dir, CommandContext& ctx) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted;
  for (auto i : order) sorted.push_back(values[i]);

  const std::vector<ScenarioConfig> configs = sweep(base, parameter, sorted);
  const Completed done = run_all(configs, ctx);

  std::vector<std::string> names;
  for (const auto& spec : base.observables) names.push_back(make_observable(base, spec).name);
  std::string csv = parameter + ",status";
  for (const auto& n : names) csv += "," + n + "," + n + "_peak," + n + "_t_half";
  csv += ",residual,message\n";
  bool any_failed = false;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    csv += format_number(sorted[i]) + "," + status_for(done.codes[i]);
    if (done.codes[i] == 0) {
      const auto& result = std::get<RunResult>(done.outcomes[i]);
      write_run_artifacts(result, out_dir);
      for (const auto& n : names) {
        const auto& o = result.observable(n);
        csv += "," + format_number(o.final_value) + "," + format_number(o.peak) + "," +
               (o.half_max_time ? format_number(*o.half_max_time) : std::string());
      }
      csv += "," + format_number(result.residual) + ",\n";
    } else {
      any_failed = true;
      for (std::size_t k = 0; k < names.size(); ++k) csv += ",,,";
      csv += ",," + csv_quote(std::get<std::string>(done.outcomes[i])) + "\n";
    }
  }
  write_file_atomic(out_dir / "sweep.csv", csv);
  ctx.out << "wrote " << (out_dir / "sweep.csv").string() << " (" << configs.size() << " rows)\n";
  return any_failed ? kExitSweepPartial : kExitOk;
}

int cmd_validate(ValidationScale scale, CommandContext& ctx) {
  const auto results = run_validation(scale);
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::vector<std::string> failed;
  for (const auto& r : results) {
    ctx.out << std::left << std::setw(static_cast<int>(width) + 2) << r.name << (r.passed ? "PASS  " : "FAIL  ")
            << r.detail << "\n";
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) {
    ctx.out << "all " << results.size() << " checks passed\n";
    return kExitOk;
  }
  for (const auto& name : failed) ctx.err << "failed check: " << name << "\n";
  return kExitValidationFailed;
}

// ---------------------------------------------------------------------------
// Figure reproduction

namespace {

struct Manifest {
  nlohmann::json files = nlohmann::json::array();
  void add(const std::string& file, const std::string& panel, const std::string& description) {
    files.push_back({{"file", file}, {"panel", panel}, {"description", description}});
  }
};

// Runs configs, writes one time-series CSV per run named prefix + suffix.
// Returns successful results in input order; failures set `code`.
std::vector<RunResult> run_curves(const std::vector<ScenarioConfig>& configs, const std::vector<std::string>& files,
                                  const std::string& panel, const fs::path& out_dir, Manifest& manifest,
                                  CommandContext& ctx, int& code) {
  Completed done = run_all(configs, ctx);
  std::vector<RunResult> results;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (done.codes[i] != 0) {
      code = std::max(code, done.codes[i]);
      continue;
    }
    auto& result = std::get<RunResult>(done.outcomes[i]);
    write_file_atomic(out_dir / files[i], timeseries_csv(result));
    manifest.add(files[i], panel, configs[i].name);
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<std::string> names_with(const std::vector<ScenarioConfig>& configs, const std::string& prefix,
                                    const std::function<std::string(const ScenarioConfig&)>& suffix) {
  std::vector<std::string> out;
  for (const auto& c : configs) out.push_back(prefix + suffix(c) + ".csv");
  return out;
}

std::string population_of(const ScenarioConfig& c, const std::string& domain) {
  return std::to_string(c.domains[static_cast<std::size_t>(domain_index(c, domain))].population);
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"intro", "fig1a", "fig3a", "fig3b", "fig4",  "fig5a",
                                               "fig5b", "fig5c", "fig6",  "appA",  "appA-mixed", "appB"};
  return ids;
}

int cmd_reproduce(const std::string& figure, const fs::path& out_dir, CommandContext& ctx) {
  if (std::find(figure_ids().begin(), figure_ids().end(), figure) == figure_ids().end()) {
    std::string list;
    for (const auto& id : figure_ids()) list += (list.empty() ? "" : ", ") + id;
    ctx.err << "unknown figure '" << figure << "' (valid: " << list << ")\n";
    return kExitInvalidConfig;
  }
  Manifest manifest;
  int code = kExitOk;
  auto steady_table = [&](const std::string& file, const std::string& panel, const std::string& header,
                          const std::vector<RunResult>& results,
                          const std::function<std::string(const RunResult&)>& row) {
    std::string csv = header + "\n";
    for (const auto& r : results) csv += row(r) + "\n";
    write_file_atomic(out_dir / file, csv);
    manifest.add(file, panel, header);
  };

  if (figure == "intro") {
    const auto configs = preset("intro-pair");
    run_curves(configs, {"intro_pair.csv"}, "intro two-spin example", out_dir, manifest, ctx, code);
  } else if (figure == "fig1a") {
    const auto configs = preset("fig1a-sweep");
    const auto results = run_curves(configs, names_with(configs, "fig1a_NA", [](const ScenarioConfig& c) {
                                      return population_of(c, "A");
                                    }),
                                    "Fig. 1(a)", out_dir, manifest, ctx, code);
    steady_table("fig1a.csv", "Fig. 1(a)", "N_A,log_negativity", results, [](const RunResult& r) {
      return population_of(r.config, "A") + "," + format_number(r.observable("log_negativity(A|B)").final_value);
    });
  } else if (figure == "fig3a") {
    const auto configs = preset("fig3a");
    run_curves(configs,
               names_with(configs, "fig3a_NB", [](const ScenarioConfig& c) { return population_of(c, "B"); }),
               "Fig. 3(a)", out_dir, manifest, ctx, code);
  } else if (figure == "fig3b") {
    const auto configs = preset("fig3b");
    const auto results = run_curves(configs, names_with(configs, "fig3b_NB", [](const ScenarioConfig& c) {
                                      return population_of(c, "B");
                                    }),
                                    "Fig. 3(b) source curves", out_dir, manifest, ctx, code);
    steady_table("fig3b.csv", "Fig. 3(b)", "N_B,eof_steady,t_half", results, [](const RunResult& r) {
      const auto& o = r.observable("eof(A,C)");
      return population_of(r.config, "B") + "," + format_number(o.final_value) + "," +
             (o.half_max_time ? format_number(*o.half_max_time) : std::string());
    });
  } else if (figure == "fig4") {
    std::vector<ScenarioConfig> configs = preset("fig4-chain4");
    configs.push_back(preset("fig4-chain5").front());
    run_curves(configs, {"fig4_chain4.csv", "fig4_chain5.csv"}, "Fig. 4", out_dir, manifest, ctx, code);
  } else if (figure == "fig5a" || figure == "fig5c") {
    const bool dephasing = figure == "fig5a";
    const auto configs = preset(dephasing ? "fig5a-dephasing" : "fig5c-thermal");
    run_curves(configs,
               names_with(configs, figure + "_",
                          [dephasing](const ScenarioConfig& c) {
                            return dephasing ? "dep" + format_number(c.gamma_dep_over_gamma)
                                             : "T" + format_number(c.temperature->kelvin);
                          }),
               dephasing ? "Fig. 5(a)" : "Fig. 5(c)", out_dir, manifest, ctx, code);
  } else if (figure == "fig5b") {
    run_curves(preset("fig5b-individual"), {"fig5b.csv"}, "Fig. 5(b)", out_dir, manifest, ctx, code);
  } else if (figure == "fig6") {
    const auto main = preset("fig6-star");
    run_curves(main, {"fig6b.csv"}, "Fig. 6(b)", out_dir, manifest, ctx, code);
    std::vector<double> sizes;
    for (int n = 1; n <= 11; ++n) sizes.push_back(n);
    auto inset = sweep(main.front(), "N_D", sizes);
    for (auto& c : inset) c.t_max = 5.0;
    const auto results = run_curves(inset, names_with(inset, "fig6b_ND", [](const ScenarioConfig& c) {
                                      return population_of(c, "D");
                                    }),
                                    "Fig. 6(b) inset source curves", out_dir, manifest, ctx, code);
    steady_table("fig6b_inset.csv", "Fig. 6(b) inset", "N_D,tripartite_negativity,c_ground,c_w,residual", results,
                 [](const RunResult& r) {
                   const auto parts = tripartite_decompose(partial_trace(r.final_state, {0, 1, 2}));
                   return population_of(r.config, "D") + "," +
                          format_number(r.observable("tripartite_negativity(A,B,C)").final_value) + "," +
                          format_number(parts.c_ground) + "," + format_number(parts.c_w) + "," +
                          format_number(parts.residual);
                 });
  } else if (figure == "appA") {
    const auto configs = preset("appA-initial-states");
    const auto results = run_curves(configs, names_with(configs, "appA_init_", [](const ScenarioConfig& c) {
                                      return c.name.substr(c.name.size() - 3);
                                    }),
                                    "initial-state comparison", out_dir, manifest, ctx, code);
    steady_table("appA_steady.csv", "initial-state comparison", "configuration,eof_steady", results,
                 [](const RunResult& r) {
                   return r.config.name.substr(r.config.name.size() - 3) + "," +
                          format_number(r.observable("eof(A,C)").final_value);
                 });
  } else if (figure == "appA-mixed") {
    const auto configs = preset("appA-mixed");
    const auto results = run_curves(configs, names_with(configs, "appA_mixed_F", [](const ScenarioConfig& c) {
                                      return format_number(c.domains[1].initial.a + c.domains[1].initial.b);
                                    }),
                                    "mixed preparation vs fidelity", out_dir, manifest, ctx, code);
    steady_table("appA_mixed.csv", "mixed preparation vs fidelity", "F_0,eof_steady", results, [](const RunResult& r) {
      return format_number(r.config.domains[1].initial.a + r.config.domains[1].initial.b) + "," +
             format_number(r.observable("eof(A,C)").final_value);
    });
  } else {  // appB
    const auto configs = preset("appB-oracle");
    const auto results = run_curves(configs, names_with(configs, "appB_NB", [](const ScenarioConfig& c) {
                                      return population_of(c, "B");
                                    }),
                                    "closed-form chain steady state", out_dir, manifest, ctx, code);
    steady_table("appB.csv", "closed-form chain steady state",
                 "N_B,dark_weight,x_dark,concurrence,concurrence_analytic,eof", results, [](const RunResult& r) {
                   const int n_b = r.config.domains[1].population;
                   return std::to_string(n_b) + "," + format_number(r.observable("dark_state_weight").final_value) +
                          "," + format_number(x_dark(n_b)) + "," +
                          format_number(r.observable("concurrence(A,C)").final_value) + "," +
                          format_number(concurrence_analytic(n_b)) + "," +
                          format_number(r.observable("eof(A,C)").final_value);
                 });
  }
  write_file_atomic(out_dir / "manifest.json",
                    nlohmann::json{{"figure", figure}, {"files", manifest.files}}.dump(2) + "\n");
  ctx.out << "wrote " << manifest.files.size() << " files and manifest.json to " << out_dir.string() << "\n";
  return code;
}

}  // namespace qlre
