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


// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// values and wall time. Criteria listed in --expect-fail are known
// deviations; the exit status is zero only when the failing set equals that
// list exactly, so an unexpected pass is reported too.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlre/dynamics.hpp"
#include "qlre/entanglement.hpp"
#include "qlre/oracle.hpp"
#include "qlre/runner.hpp"
#include "qlre/scenarios.hpp"

using namespace qlre;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0 when the criterion sets none
  std::function<Outcome()> check;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

double final_of(const RunResult& r, const std::string& name) { return r.observable(name).final_value; }

std::vector<RunResult> run_all(const std::vector<ScenarioConfig>& configs) {
  std::vector<RunResult> out;
  for (const auto& c : configs) out.push_back(run_scenario(c));
  return out;
}

ScenarioConfig with_population(ScenarioConfig c, const std::string& domain, int n) {
  c.domains[static_cast<std::size_t>(domain_index(c, domain))].population = n;
  return c;
}

MasterEquation chain_equation(Backend backend, int n_b) {
  return build_collective_zero_T(BasisDescriptor(backend, {1, n_b, 1}), chain_reservoirs(3));
}

DensityMatrix chain_start(Backend backend, int n_b, int a, int b, int c) {
  return product_state(BasisDescriptor(backend, {1, n_b, 1}),
                       {LocalState{DickeLevel{a}}, LocalState{DickeLevel{b}}, LocalState{DickeLevel{c}}});
}

// ---------------------------------------------------------------------------

Outcome intro_pair() {
  Outcome o;
  const auto r = run_scenario(preset("intro-pair").front());
  const double e = final_of(r, "eof(A,B)");
  o.require(within(e, 0.3546, 0.001), "steady E_F " + fmt(e) + " vs 0.3546 +- 0.001");
  return o;
}

Outcome double_domain() {
  Outcome o;
  const auto runs = run_all(preset("fig1a-sweep"));
  int best = 0;
  double peak = -1;
  std::string series;
  for (const auto& r : runs) {
    const double v = final_of(r, "log_negativity(A|B)");
    const int n_a = r.config.domains[0].population;
    series += (series.empty() ? "" : " ") + fmt(v, 4);
    if (v > peak) {
      peak = v;
      best = n_a;
    }
  }
  o.require(best == 5, "peak at N_A = " + std::to_string(best) + " (want 5)");
  o.require(within(peak, 0.55, 0.01), "E_N peak " + fmt(peak) + " vs 0.55 +- 0.01");
  o.detail += "; E_N(N_A=1..8) = " + series;
  return o;
}

Outcome chain_steady() {
  Outcome o;
  const auto runs = run_all(preset("fig3b"));
  bool eof_monotone = true, te_monotone = true;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto& prev = runs[i - 1].observable("eof(A,C)");
    const auto& cur = runs[i].observable("eof(A,C)");
    eof_monotone = eof_monotone && cur.final_value >= prev.final_value;
    te_monotone = te_monotone && *cur.half_max_time <= *prev.half_max_time;
  }
  const auto& last = runs.back().observable("eof(A,C)");
  o.require(runs.back().config.domains[1].population == 12 && within(last.final_value, 0.315, 0.005),
            "E_F(N_B=12) " + fmt(last.final_value) + " vs 0.315 +- 0.005");
  o.require(eof_monotone, "E_F nondecreasing over N_B = 2..12");
  o.require(te_monotone, "t_E nonincreasing (" + fmt(*runs.front().observable("eof(A,C)").half_max_time, 4) +
                             " -> " + fmt(*last.half_max_time, 4) + ")");
  return o;
}

Outcome appendix_b_oracle() {
  Outcome o;
  double worst_distance = 0, worst_concurrence = 0;
  for (int n_b = 1; n_b <= 8; ++n_b) {
    const auto result = steady_state(chain_equation(Backend::Collective, n_b), chain_start(Backend::Collective, n_b, 1, 0, 0));
    const DensityMatrix full = to_full(result.rho);
    worst_distance = std::max(worst_distance, trace_distance(full.matrix(), chain_dark_steady(n_b).matrix()));
    const double c = concurrence(partial_trace(result.rho, {0, 2}));
    worst_concurrence = std::max(worst_concurrence, std::abs(c - concurrence_analytic(n_b)));
  }
  o.require(worst_distance < 1e-7, "max trace distance to closed form " + fmt(worst_distance, 3) + " (< 1e-7)");
  o.require(worst_concurrence < 1e-6, "max |C - 2N^2/(2N+1)^2| " + fmt(worst_concurrence, 3) + " (< 1e-6)");
  return o;
}

Outcome dark_state_stationarity() {
  Outcome o;
  double worst_full = 0, worst_coll = 0;
  for (int n_b = 1; n_b <= 8; ++n_b) {
    const PureState psi = dark_state(n_b);
    worst_full = std::max(worst_full, lindblad_rhs(chain_equation(Backend::Full, n_b), DensityMatrix::from_pure(psi)).norm());
    worst_coll = std::max(worst_coll, lindblad_rhs(chain_equation(Backend::Collective, n_b),
                                                   DensityMatrix::from_pure(to_collective(psi)))
                                          .norm());
  }
  o.require(worst_full < 1e-10, "full backend max |rhs|_F " + fmt(worst_full, 3));
  o.require(worst_coll < 1e-10, "collective backend max |rhs|_F " + fmt(worst_coll, 3));
  return o;
}

Outcome limit_consistency() {
  Outcome o;
  const double e = eof_from_concurrence(x_reduced(1000));
  o.require(within(e, 0.354, 0.001), "E_F(x(N_B=1000)) " + fmt(e) + " vs 0.354 +- 0.001");
  return o;
}

Outcome tripartite_star() {
  Outcome o;
  const auto main = run_scenario(preset("fig6-star").front());
  const double n_abc = final_of(main, "tripartite_negativity(A,B,C)");
  o.require(within(n_abc, 0.043, 0.003), "N_ABC(N_D=11) " + fmt(n_abc) + " vs 0.043 +- 0.003");

  std::vector<double> sizes;
  for (int n = 1; n <= 11; ++n) sizes.push_back(n);
  auto inset = sweep(preset("fig6-star").front(), "N_D", sizes);
  for (auto& c : inset) c.t_max = 5.0;
  bool increasing = true;
  double previous = 0;
  for (const auto& r : run_all(inset)) {
    const double v = final_of(r, "tripartite_negativity(A,B,C)");
    increasing = increasing && v > previous;
    previous = v;
  }
  o.require(increasing, "inset N_D = 1..11 strictly increasing");

  const double w = tripartite_negativity(DensityMatrix::from_pure(w_state()));
  o.require(std::abs(w - std::sqrt(2.0) / 3.0) <= 1e-9, "W state " + fmt(w, 10) + " vs sqrt(2)/3 +- 1e-9");
  o.require(within(w, 0.47, 0.005), "W state rounds to 0.47");
  return o;
}

// Realistic effects at reduced size: Full N_B = 5 for dephasing and
// individual noise, Collective N_B = 11 for temperature.
Outcome realistic_effects() {
  Outcome o;
  auto peaks = [](const std::vector<ScenarioConfig>& configs) {
    std::vector<double> out;
    for (const auto& r : run_all(configs)) out.push_back(r.observable("eof(A,C)").peak);
    return out;
  };
  auto strictly_decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] < v[i - 1])) return false;
    return true;
  };
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x, 4);
    return s;
  };

  std::vector<ScenarioConfig> dephasing;
  for (const auto& c : preset("fig5a-dephasing")) dephasing.push_back(with_population(c, "B", 5));
  const auto dep = peaks(dephasing);
  o.require(strictly_decreasing(dep), "peak E_F vs gamma_dep/gamma {0,.02,.05,.1,.2}: " + list(dep));

  const auto thermal = peaks(preset("fig5c-thermal"));
  o.require(strictly_decreasing(thermal), "peak E_F vs T {0,.05,.1,.2,.5} K: " + list(thermal));

  const auto individual = run_scenario(with_population(preset("fig5b-individual").front(), "B", 5));
  const auto& series = individual.trajectory.series("eof(A,C)");
  const auto& summary = individual.observable("eof(A,C)");
  const auto peak_at = static_cast<std::size_t>(std::max_element(series.begin(), series.end()) - series.begin());
  bool decays = summary.final_value < 0.5 * summary.peak;
  for (std::size_t i = peak_at + 1; i < series.size(); ++i) decays = decays && series[i] <= series[i - 1] + 1e-9;
  o.require(summary.peak < 0.02, "individual noise peak E_F " + fmt(summary.peak, 4) + " (< 0.02)");
  o.require(decays, "E_F decays after its peak (final " + fmt(summary.final_value, 3) + ")");
  return o;
}

Outcome appendix_a() {
  Outcome o;
  std::vector<std::pair<std::string, double>> steady;
  for (const auto& c : preset("appA-initial-states")) {
    const auto r = run_scenario(with_population(c, "B", 4));
    steady.emplace_back(c.name.substr(c.name.size() - 3), final_of(r, "eof(A,C)"));
  }
  auto value = [&](const std::string& bits) {
    for (const auto& [k, v] : steady)
      if (k == bits) return v;
    return -1.0;
  };
  const std::vector<double> strong{value("010"), value("100"), value("001")};
  const double hi = *std::max_element(strong.begin(), strong.end());
  const double lo = *std::min_element(strong.begin(), strong.end());
  o.require(hi - lo <= 0.1 * hi, "entangling configs 010/100/001 " + fmt(strong[0], 4) + " " + fmt(strong[1], 4) + " " +
                                     fmt(strong[2], 4) + " within 10%");
  o.require(value("111") > 0, "all-up config " + fmt(value("111"), 4) + " > 0");
  o.require(value("011") < 0.006 && value("110") < 0.006,
            "weak config 011/110 " + fmt(value("011"), 4) + " (< 0.006)");
  o.require(value("101") < 0.006, "weak config 101 " + fmt(value("101"), 4) + " (< 0.006)");

  const auto mixed = run_all(preset("appA-mixed"));
  bool nondecreasing = true;
  for (std::size_t i = 1; i < mixed.size(); ++i)
    nondecreasing = nondecreasing && final_of(mixed[i], "eof(A,C)") >= final_of(mixed[i - 1], "eof(A,C)");
  o.require(nondecreasing, "mixed preparation E_F nondecreasing in F_0 (" + fmt(final_of(mixed.front(), "eof(A,C)"), 4) +
                               " -> " + fmt(final_of(mixed.back(), "eof(A,C)"), 4) + ")");
  ScenarioConfig pure = mixed.back().config;
  pure.name = "appA-pure";
  pure.domains[1].initial = DomainInitial::excited();
  const double gap = std::abs(final_of(run_scenario(pure), "eof(A,C)") - final_of(mixed.back(), "eof(A,C)"));
  o.require(gap < 1e-8, "F_0 = 1 vs pure run " + fmt(gap, 3) + " (< 1e-8)");
  return o;
}

Outcome backend_equivalence() {
  Outcome o;
  double worst = 0;
  for (int n_b = 1; n_b <= 5; ++n_b) {
    for (const auto& [a, b, c] : std::vector<std::tuple<int, int, int>>{{0, n_b, 0}, {1, 0, 0}, {1, n_b, 1}, {0, 1, 1}}) {
      EvolveOptions options;
      options.keep = {0, 2};
      const auto coll = evolve(chain_equation(Backend::Collective, n_b), chain_start(Backend::Collective, n_b, a, b, c),
                               6.0, 0.25, options);
      const auto full =
          evolve(chain_equation(Backend::Full, n_b), to_full(chain_start(Backend::Collective, n_b, a, b, c)), 6.0, 0.25, options);
      for (std::size_t i = 0; i < coll.snapshots.size(); ++i) {
        const CMatrix& x = coll.snapshots[i].matrix();
        const CMatrix& y = full.snapshots[i].matrix();
        worst = std::max({worst, trace_distance(x, y),
                          trace_distance(partial_trace(x, coll.snapshots[i].basis(), {0}),
                                         partial_trace(y, full.snapshots[i].basis(), {0})),
                          trace_distance(partial_trace(x, coll.snapshots[i].basis(), {1}),
                                         partial_trace(y, full.snapshots[i].basis(), {1}))});
      }
    }
  }
  o.require(worst < 1e-8, "max snapshot trace distance (rho_AC, rho_A, rho_C) " + fmt(worst, 3) + " (< 1e-8)");
  return o;
}

Outcome longer_chains() {
  Outcome o;
  for (const auto& [name, observable] :
       std::vector<std::pair<std::string, std::string>>{{"fig4-chain4", "eof(A,D)"}, {"fig4-chain5", "eof(A,E)"}}) {
    const auto r = run_scenario(preset(name).front());
    const auto& t = r.trajectory.times;
    const auto& e = r.trajectory.series(observable);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= 0.8 * t.back()) {
        lo = std::min(lo, e[i]);
        hi = std::max(hi, e[i]);
      }
    o.require(e.back() > 0, name + " steady E_F " + fmt(e.back()) + " > 0");
    o.require(hi - lo < 1e-6, name + " drift over final 20% " + fmt(hi - lo, 3) + " (< 1e-6)");
  }
  return o;
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> ids;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) ids.insert(std::stoi(token));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string expect_fail, only;
  app.add_option("--expect-fail", expect_fail, "Comma list of criteria documented as unattainable");
  app.add_option("--only", only, "Comma list of criteria to run");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "two-spin steady entanglement", 1.0, intro_pair},
      {2, "double-domain log-negativity peak", 30.0, double_domain},
      {3, "three-domain chain steady entanglement", 120.0, chain_steady},
      {4, "closed-form steady state for N_B = 1..8", 0.0, appendix_b_oracle},
      {5, "dark-state stationarity", 0.0, dark_state_stationarity},
      {6, "large-N_B limit of the closed form", 0.0, limit_consistency},
      {7, "tripartite star", 120.0, tripartite_star},
      {8, "dephasing, individual noise and temperature trends", 0.0, realistic_effects},
      {9, "alternate initial states", 0.0, appendix_a},
      {10, "backend cross-validation", 0.0, backend_equivalence},
      {11, "four- and five-domain chains", 0.0, longer_chains},
  };
  const std::set<int> expected = parse_ids(expect_fail);
  const std::set<int> selected = parse_ids(only);

  std::set<int> failed;
  int run = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    ++run;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("error: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0) outcome.require(seconds < c.time_limit_s, "runtime < " + fmt(c.time_limit_s) + " s");
    if (!outcome.passed) failed.insert(c.id);
    std::cout << (outcome.passed ? "PASS" : "FAIL") << "  C" << c.id << " " << c.title << ": " << outcome.detail << " ("
              << fmt(seconds, 3) << " s)" << (expected.count(c.id) ? " [documented deviation]" : "") << std::endl;
  }

  std::set<int> expected_run;
  for (int id : expected)
    if (selected.empty() || selected.count(id)) expected_run.insert(id);
  std::cout << run - static_cast<int>(failed.size()) << "/" << run << " criteria passed" << std::endl;
  if (failed == expected_run) return 0;
  for (int id : failed)
    if (!expected_run.count(id)) std::cout << "unexpected failure: C" << id << std::endl;
  for (int id : expected_run)
    if (!failed.count(id)) std::cout << "unexpected pass: C" << id << " (update the documented deviations)" << std::endl;
  return 1;
}
