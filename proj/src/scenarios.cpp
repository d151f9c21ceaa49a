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


#include "qlre/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qlre/entanglement.hpp"
#include "qlre/errors.hpp"
#include "qlre/oracle.hpp"

namespace qlre {

namespace {

// CODATA 2018 exact values.
constexpr double kHbar = 1.054571817e-34;      // J s
constexpr double kBoltzmann = 1.380649e-23;    // J / K
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw InvalidArgument(field + ": " + what);
}

std::string domain_field(std::size_t i) { return "domains[" + std::to_string(i) + "]"; }

std::string default_domain_name(std::size_t i) {
  std::string name;
  std::size_t n = i;
  do {
    name.insert(name.begin(), static_cast<char>('A' + n % 26));
    n = n / 26;
  } while (n-- > 0);
  return name;
}

double identity_dimension(int population, MixedBasis basis) {
  return basis == MixedBasis::Full ? std::ldexp(1.0, population) : population + 1.0;
}

bool needs_full_backend(const ScenarioConfig& config) {
  if (config.include_individual || config.gamma_dep_over_gamma > 0.0) return true;
  if (config.mixed_basis == MixedBasis::Full)
    for (const auto& d : config.domains)
      if (d.initial.kind == DomainInitial::Kind::Mixed && d.population > 1 && d.initial.b > 0.0) return true;
  return false;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

double bose_einstein_nbar(double omega0_over_2pi_hz, double kelvin) {
  if (!(omega0_over_2pi_hz > 0.0) || !std::isfinite(omega0_over_2pi_hz))
    throw InvalidArgument("omega0_over_2pi_hz must be a positive frequency");
  if (!(kelvin >= 0.0) || !std::isfinite(kelvin)) throw InvalidArgument("temperature must be >= 0 kelvin");
  if (kelvin == 0.0) return 0.0;
  const double ratio = kHbar * 2.0 * kPi * omega0_over_2pi_hz / (kBoltzmann * kelvin);
  return 1.0 / std::expm1(ratio);
}

double effective_nbar(const ScenarioConfig& config) {
  if (config.temperature) return bose_einstein_nbar(config.temperature->omega0_over_2pi_hz, config.temperature->kelvin);
  return config.nbar;
}

void validate(const ScenarioConfig& config, bool allow_large) {
  if (config.domains.size() < 2) fail("domains", "at least two domains are required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < config.domains.size(); ++i) {
    const auto& d = config.domains[i];
    const std::string field = domain_field(i);
    if (d.name.empty()) fail(field + ".name", "must not be empty");
    if (!names.insert(d.name).second) fail(field + ".name", "duplicate domain name '" + d.name + "'");
    if (d.population < 1) fail(field + ".population", "must be >= 1");
    if (d.population > 62) fail(field + ".population", "too large");
    switch (d.initial.kind) {
      case DomainInitial::Kind::Dicke:
        if (d.initial.excitations < 0 || d.initial.excitations > d.population)
          fail(field + ".initial.dicke", "excitation count must lie in [0, population]");
        break;
      case DomainInitial::Kind::Mixed: {
        if (!(d.initial.a >= 0.0) || !(d.initial.b >= 0.0)) fail(field + ".initial.mixed", "a and b must be >= 0");
        const double total = d.initial.a + d.initial.b * identity_dimension(d.population, config.mixed_basis);
        if (std::abs(total - 1.0) > 1e-9) fail(field + ".initial.mixed", "a + b * dim(I) must equal 1");
        break;
      }
      default:
        break;
    }
  }
  for (std::size_t r = 0; r < config.reservoirs.size(); ++r) {
    const auto& res = config.reservoirs[r];
    const std::string field = "reservoirs[" + std::to_string(r) + "]";
    if (res.domains.empty()) fail(field + ".domains", "must not be empty");
    std::set<int> seen;
    for (int m : res.domains) {
      if (m < 0 || m >= static_cast<int>(config.domains.size())) fail(field + ".domains", "unknown domain");
      if (!seen.insert(m).second) fail(field + ".domains", "duplicate domain");
    }
    if (!(res.rate >= 0.0) || !std::isfinite(res.rate)) fail(field + ".rate", "must be a finite value >= 0");
  }
  if (!(config.nbar >= 0.0) || !std::isfinite(config.nbar)) fail("nbar", "must be a finite value >= 0");
  if (config.temperature) {
    if (!(config.temperature->kelvin >= 0.0) || !std::isfinite(config.temperature->kelvin))
      fail("temperature.kelvin", "must be >= 0");
    if (!(config.temperature->omega0_over_2pi_hz > 0.0) || !std::isfinite(config.temperature->omega0_over_2pi_hz))
      fail("temperature.omega0_over_2pi_hz", "must be > 0");
  }
  if (!(config.gamma_dep_over_gamma >= 0.0) || !std::isfinite(config.gamma_dep_over_gamma))
    fail("gamma_dep_over_gamma", "must be a finite value >= 0");
  if (!(config.t_max >= 0.0) || !std::isfinite(config.t_max)) fail("t_max", "must be a finite value >= 0");
  if (!(config.sample_dt > 0.0) || !std::isfinite(config.sample_dt)) fail("sample_dt", "must be > 0");
  if (!(config.steady_tol > 0.0)) fail("steady_tol", "must be > 0");
  if (!(config.max_time > 0.0) || !std::isfinite(config.max_time)) fail("max_time", "must be a finite value > 0");
  if (config.run_to_steady && config.max_time < config.t_max) fail("max_time", "must be >= t_max");

  int spins = 0;
  for (const auto& d : config.domains) spins += d.population;
  if (config.include_individual && spins > kIndividualSpinCap && !allow_large)
    fail("include_individual", std::to_string(spins) + " spins exceed the cap of " +
                                   std::to_string(kIndividualSpinCap) + " for individual noise (override with --force)");
  if (needs_full_backend(config) && spins > 30) fail("domains", "too many spins for the full backend");

  resolve_backend(config);
  for (std::size_t i = 0; i < config.observables.size(); ++i) {
    try {
      make_observable(config, config.observables[i]);
    } catch (const Error& e) {
      fail("observables[" + std::to_string(i) + "]", e.what());
    }
  }
}

Backend resolve_backend(const ScenarioConfig& config) {
  const bool full = needs_full_backend(config);
  switch (config.backend) {
    case BackendChoice::Collective:
      if (full)
        throw UnsupportedConfiguration(
            "backend: collective cannot represent individual noise, dephasing or full-space mixed preparation");
      return Backend::Collective;
    case BackendChoice::Full:
      return Backend::Full;
    case BackendChoice::Auto:
      break;
  }
  return full ? Backend::Full : Backend::Collective;
}

BasisDescriptor scenario_basis(const ScenarioConfig& config) {
  std::vector<int> pops;
  for (const auto& d : config.domains) pops.push_back(d.population);
  return BasisDescriptor(resolve_backend(config), std::move(pops));
}

std::uint64_t density_matrix_bytes(const ScenarioConfig& config) {
  const Backend backend = resolve_backend(config);
  long double dim = 1.0L;
  for (const auto& d : config.domains)
    dim *= static_cast<long double>(domain_dimension(backend, d.population));
  const long double bytes = 16.0L * dim * dim;
  if (bytes > 1.8e19L) return UINT64_MAX;
  return static_cast<std::uint64_t>(bytes);
}

int domain_index(const ScenarioConfig& config, std::string_view name) {
  for (std::size_t i = 0; i < config.domains.size(); ++i)
    if (config.domains[i].name == name) return static_cast<int>(i);
  throw InvalidArgument("unknown domain '" + std::string(name) + "'");
}

DensityMatrix build_initial_state(const ScenarioConfig& config) {
  const BasisDescriptor basis = scenario_basis(config);
  std::vector<LocalState> levels;
  for (std::size_t i = 0; i < config.domains.size(); ++i) {
    const auto& d = config.domains[i];
    switch (d.initial.kind) {
      case DomainInitial::Kind::Ground:
        levels.emplace_back(ground_level());
        break;
      case DomainInitial::Kind::Excited:
        levels.emplace_back(excited_level(d.population));
        break;
      case DomainInitial::Kind::Dicke:
        levels.emplace_back(DickeLevel{d.initial.excitations});
        break;
      case DomainInitial::Kind::Mixed: {
        const Index dim = basis.domain_dims()[i];
        CMatrix local;
        if (basis.backend() == Backend::Full && config.mixed_basis == MixedBasis::Symmetric) {
          const CMatrix v = symmetric_isometry(d.population);
          local = d.initial.b * v * v.adjoint();
        } else if (basis.backend() == Backend::Collective && config.mixed_basis == MixedBasis::Full &&
                   d.population > 1 && d.initial.b > 0.0) {
          throw UnsupportedConfiguration(domain_field(i) + ": full-space mixed preparation needs the full backend");
        } else {
          local = d.initial.b * CMatrix::Identity(dim, dim);
        }
        local(0, 0) += d.initial.a;  // index 0 is all-up in both backends
        levels.emplace_back(std::move(local));
        break;
      }
    }
  }
  return product_state(basis, levels);
}

MasterEquation build_equation(const ScenarioConfig& config) {
  const BasisDescriptor basis = scenario_basis(config);
  std::vector<Reservoir> reservoirs;
  for (const auto& r : config.reservoirs) reservoirs.push_back({r.domains, r.rate});
  return build_realistic(basis, reservoirs, effective_nbar(config), config.include_individual,
                         config.gamma_dep_over_gamma);
}

// ---------------------------------------------------------------------------
// Observables

namespace {

struct ParsedObservable {
  std::string function;
  std::vector<std::vector<std::string>> groups;  // split on '|', then ','
};

ParsedObservable parse_observable(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != ' ' && c != '\t') text.push_back(c);
  ParsedObservable out;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    out.function = text;
    return out;
  }
  if (text.back() != ')') throw InvalidArgument("observable '" + raw + "' is missing ')'");
  out.function = text.substr(0, open);
  const std::string args = text.substr(open + 1, text.size() - open - 2);
  std::vector<std::string> group;
  std::string token;
  for (std::size_t i = 0; i <= args.size(); ++i) {
    const char c = i < args.size() ? args[i] : '\0';
    if (c == ',' || c == '|' || c == '\0') {
      if (token.empty()) throw InvalidArgument("observable '" + raw + "' has an empty argument");
      group.push_back(token);
      token.clear();
      if (c != ',') {
        out.groups.push_back(std::move(group));
        group.clear();
      }
    } else {
      token.push_back(c);
    }
  }
  return out;
}

std::string canonical_name(const ParsedObservable& p) {
  if (p.groups.empty()) return p.function;
  std::string name = p.function + "(";
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    if (g > 0) name += "|";
    for (std::size_t i = 0; i < p.groups[g].size(); ++i) name += (i > 0 ? "," : "") + p.groups[g][i];
  }
  return name + ")";
}

std::vector<int> resolve_domains(const ScenarioConfig& config, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(domain_index(config, n));
  std::set<int> unique(out.begin(), out.end());
  if (unique.size() != out.size()) throw InvalidArgument("repeated domain in observable");
  return out;
}

void require_qubits(const ScenarioConfig& config, const std::vector<int>& domains, const std::string& what) {
  for (int m : domains)
    if (config.domains[static_cast<std::size_t>(m)].population != 1)
      throw InvalidArgument(what + " needs single-spin domains, '" + config.domains[static_cast<std::size_t>(m)].name +
                            "' has " + std::to_string(config.domains[static_cast<std::size_t>(m)].population));
}

// Reduces to `keep` unless it already covers every domain.
DensityMatrix reduce(const DensityMatrix& rho, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  if (keep.size() == rho.basis().num_domains()) return rho;
  return partial_trace(rho, keep);
}

}  // namespace

Observable make_observable(const ScenarioConfig& config, const std::string& spec) {
  const ParsedObservable p = parse_observable(spec);
  const std::string name = canonical_name(p);
  const auto arity = [&](std::size_t groups, const std::string& usage) {
    if (p.groups.size() != groups) throw InvalidArgument("observable '" + spec + "': expected " + usage);
  };

  if (p.function == "eof" || p.function == "concurrence") {
    arity(1, p.function + "(X,Y)");
    const auto domains = resolve_domains(config, p.groups[0]);
    if (domains.size() != 2) throw InvalidArgument("observable '" + spec + "': expected two domains");
    require_qubits(config, domains, p.function);
    const bool eof = p.function == "eof";
    return {name, [domains, eof](const DensityMatrix& rho) {
              const DensityMatrix pair = reduce(rho, domains);
              return eof ? entanglement_of_formation(pair) : concurrence(pair);
            }};
  }
  if (p.function == "jz_norm") {
    arity(1, "jz_norm(X)");
    const auto domains = resolve_domains(config, p.groups[0]);
    if (domains.size() != 1) throw InvalidArgument("observable '" + spec + "': expected one domain");
    const BasisDescriptor basis = scenario_basis(config);
    const int m = domains[0];
    const int population = config.domains[static_cast<std::size_t>(m)].population;
    const Operator jz = embed(collective_jz(population, basis.backend()), basis, m);
    return {name, [jz, population](const DensityMatrix& rho) { return expectation(rho, jz) / population; }};
  }
  if (p.function == "negativity" || p.function == "log_negativity") {
    arity(2, p.function + "(X|Y)");
    const auto side = resolve_domains(config, p.groups[0]);
    const auto other = resolve_domains(config, p.groups[1]);
    std::vector<int> keep = side;
    keep.insert(keep.end(), other.begin(), other.end());
    if (std::set<int>(keep.begin(), keep.end()).size() != keep.size())
      throw InvalidArgument("observable '" + spec + "': the two sides overlap");
    std::sort(keep.begin(), keep.end());
    std::vector<int> reduced_side;
    for (int m : side)
      reduced_side.push_back(static_cast<int>(std::find(keep.begin(), keep.end(), m) - keep.begin()));
    const bool log = p.function == "log_negativity";
    return {name, [keep, reduced_side, log](const DensityMatrix& rho) {
              const DensityMatrix r = reduce(rho, keep);
              return log ? log_negativity(r, reduced_side) : negativity(r, reduced_side);
            }};
  }
  if (p.function == "tripartite_negativity") {
    arity(1, "tripartite_negativity(X,Y,Z)");
    const auto domains = resolve_domains(config, p.groups[0]);
    if (domains.size() != 3) throw InvalidArgument("observable '" + spec + "': expected three domains");
    require_qubits(config, domains, p.function);
    return {name, [domains](const DensityMatrix& rho) { return tripartite_negativity(reduce(rho, domains)); }};
  }
  if (p.function == "dark_state_weight") {
    arity(0, "dark_state_weight without arguments");
    const auto& d = config.domains;
    if (d.size() != 3 || d[0].population != 1 || d[2].population != 1)
      throw InvalidArgument("dark_state_weight needs a (1, N, 1) chain");
    PureState psi = dark_state(d[1].population);
    if (resolve_backend(config) == Backend::Collective) psi = to_collective(psi);
    return {name, [psi](const DensityMatrix& rho) { return fidelity_with_pure(rho, psi); }};
  }
  throw InvalidArgument("unknown observable '" + spec +
                        "' (known: eof, concurrence, jz_norm, negativity, log_negativity, "
                        "tripartite_negativity, dark_state_weight)");
}

// ---------------------------------------------------------------------------
// Presets

namespace {

ScenarioConfig chain(const std::string& name, const std::vector<int>& pops, const std::vector<DomainInitial>& initial) {
  ScenarioConfig c;
  c.name = name;
  for (std::size_t i = 0; i < pops.size(); ++i) c.domains.push_back({default_domain_name(i), pops[i], initial[i]});
  for (int m = 0; m + 1 < static_cast<int>(pops.size()); ++m) c.reservoirs.push_back({{m, m + 1}, 1.0});
  return c;
}

ScenarioConfig main_chain(const std::string& name, int n_b) {
  return chain(name, {1, n_b, 1}, {DomainInitial::ground(), DomainInitial::excited(), DomainInitial::ground()});
}

ScenarioConfig star(const std::string& name, int n_d) {
  ScenarioConfig c;
  c.name = name;
  for (int i = 0; i < 3; ++i) c.domains.push_back({default_domain_name(static_cast<std::size_t>(i)), 1, {}});
  c.domains.push_back({"D", n_d, DomainInitial::excited()});
  for (int leaf = 0; leaf < 3; ++leaf) c.reservoirs.push_back({{leaf, 3}, 1.0});
  c.observables = {"tripartite_negativity(A,B,C)"};
  c.run_to_steady = true;
  c.t_max = 10.0;
  c.sample_dt = 0.02;
  return c;
}

std::vector<ScenarioConfig> build_preset(const std::string& name) {
  std::vector<ScenarioConfig> out;
  if (name == "intro-pair") {
    ScenarioConfig c;
    c.name = name;
    c.domains = {{"A", 1, DomainInitial::excited()}, {"B", 1, DomainInitial::ground()}};
    c.reservoirs = {{{0, 1}, 1.0}};
    c.observables = {"eof(A,B)", "concurrence(A,B)"};
    c.t_max = 5.0;
    c.sample_dt = 0.02;
    c.run_to_steady = true;
    out.push_back(c);
  } else if (name == "fig1a-sweep") {
    for (int n_a = 1; n_a <= 8; ++n_a) {
      ScenarioConfig c;
      c.name = "fig1a-NA" + std::to_string(n_a);
      c.domains = {{"A", n_a, DomainInitial::excited()}, {"B", 1, DomainInitial::ground()}};
      c.reservoirs = {{{0, 1}, 1.0}};
      c.observables = {"log_negativity(A|B)"};
      c.t_max = 5.0;
      c.run_to_steady = true;
      out.push_back(c);
    }
  } else if (name == "fig3a" || name == "fig3b") {
    // The panel plots "various values" of N_B without listing them; 3, 6, 9
    // and 12 span the range of the companion panel.
    const std::vector<int> sizes =
        name == "fig3a" ? std::vector<int>{3, 6, 9, 12} : std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    for (int n_b : sizes) {
      ScenarioConfig c = main_chain(name + "-NB" + std::to_string(n_b), n_b);
      c.observables = name == "fig3a" ? std::vector<std::string>{"eof(A,C)", "jz_norm(B)"}
                                      : std::vector<std::string>{"eof(A,C)"};
      c.t_max = 10.0;
      c.sample_dt = name == "fig3a" ? 0.02 : 0.005;
      c.run_to_steady = true;
      out.push_back(c);
    }
  } else if (name == "fig4-chain4") {
    ScenarioConfig c = chain(name, {1, 6, 6, 1},
                             {DomainInitial::ground(), DomainInitial::excited(), DomainInitial::ground(),
                              DomainInitial::ground()});
    c.observables = {"eof(A,D)"};
    c.t_max = 60.0;
    c.sample_dt = 0.1;
    out.push_back(c);
  } else if (name == "fig4-chain5") {
    ScenarioConfig c = chain(name, {1, 4, 4, 4, 1},
                             {DomainInitial::ground(), DomainInitial::excited(), DomainInitial::ground(),
                              DomainInitial::ground(), DomainInitial::ground()});
    c.observables = {"eof(A,E)"};
    c.t_max = 80.0;
    c.sample_dt = 0.1;
    out.push_back(c);
  } else if (name == "fig5a-dephasing") {
    for (double rate : {0.0, 0.02, 0.05, 0.1, 0.2}) {
      ScenarioConfig c = main_chain("fig5a-dep" + format_value(rate), 7);
      c.gamma_dep_over_gamma = rate;
      c.backend = BackendChoice::Full;
      c.observables = {"eof(A,C)"};
      c.t_max = 15.0;
      out.push_back(c);
    }
  } else if (name == "fig5b-individual") {
    ScenarioConfig c = main_chain("fig5b-individual", 7);
    c.include_individual = true;
    c.observables = {"eof(A,C)"};
    c.t_max = 15.0;
    c.sample_dt = 0.01;
    out.push_back(c);
  } else if (name == "fig5c-thermal") {
    for (double kelvin : {0.0, 0.05, 0.1, 0.2, 0.5}) {
      ScenarioConfig c = main_chain("fig5c-T" + format_value(kelvin), 11);
      c.temperature = TemperatureSpec{kelvin, 10e9};
      c.observables = {"eof(A,C)"};
      c.t_max = 20.0;
      out.push_back(c);
    }
  } else if (name == "fig6-star") {
    out.push_back(star(name, 11));
  } else if (name == "appA-initial-states") {
    for (int bits = 0; bits < 8; ++bits) {
      const bool a = bits & 4, b = bits & 2, c_up = bits & 1;
      ScenarioConfig c = chain("appA-" + std::to_string(a) + std::to_string(b) + std::to_string(c_up), {1, 10, 1},
                               {a ? DomainInitial::excited() : DomainInitial::ground(),
                                b ? DomainInitial::excited() : DomainInitial::ground(),
                                c_up ? DomainInitial::excited() : DomainInitial::ground()});
      c.observables = {"eof(A,C)"};
      c.t_max = 20.0;
      c.run_to_steady = true;
      out.push_back(c);
    }
  } else if (name == "appA-mixed") {
    for (double f : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
      ScenarioConfig c = main_chain("appA-mixed-F" + format_value(f), 4);
      const auto [a, b] = mixed_weights(f, 4, MixedBasis::Full);
      c.domains[1].initial = DomainInitial::mixed(a, b);
      c.backend = BackendChoice::Full;
      c.observables = {"eof(A,C)"};
      c.t_max = 20.0;
      c.run_to_steady = true;
      out.push_back(c);
    }
  } else if (name == "appB-oracle") {
    for (int n_b = 1; n_b <= 8; ++n_b) {
      ScenarioConfig c = chain("appB-NB" + std::to_string(n_b), {1, n_b, 1},
                               {DomainInitial::excited(), DomainInitial::ground(), DomainInitial::ground()});
      c.observables = {"eof(A,C)", "concurrence(A,C)", "dark_state_weight"};
      c.t_max = 10.0;
      c.run_to_steady = true;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "intro-pair",      "fig1a-sweep",      "fig3a",         "fig3b",     "fig4-chain4",
      "fig4-chain5",     "fig5a-dephasing",  "fig5b-individual", "fig5c-thermal", "fig6-star",
      "appA-initial-states", "appA-mixed",   "appB-oracle"};
  return names;
}

std::vector<ScenarioConfig> preset(const std::string& name) {
  auto configs = build_preset(name);
  if (configs.empty()) {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown preset '" + name + "' (valid: " + list + ")");
  }
  return configs;
}

// ---------------------------------------------------------------------------
// Sweeps

std::pair<double, double> mixed_weights(double fidelity, int population, MixedBasis basis) {
  if (population < 1) throw InvalidArgument("population must be >= 1");
  const double dim = identity_dimension(population, basis);
  if (!(fidelity >= 1.0 / dim - 1e-15 && fidelity <= 1.0))
    throw InvalidArgument("F_0 must lie in [1/dim, 1] for a nonnegative mixture");
  const double b = (1.0 - fidelity) / (dim - 1.0);
  return {fidelity - b, b};
}

std::vector<ScenarioConfig> sweep(const ScenarioConfig& base, const std::string& parameter,
                                  const std::vector<double>& values) {
  if (std::find(kSweepParameters.begin(), kSweepParameters.end(), parameter) == kSweepParameters.end()) {
    std::string list;
    for (const auto& p : kSweepParameters) list += (list.empty() ? "" : ", ") + p;
    throw InvalidArgument("cannot sweep '" + parameter + "' (valid: " + list + ")");
  }
  std::vector<ScenarioConfig> out;
  for (double v : values) {
    ScenarioConfig c = base;
    c.name = base.name + "-" + parameter + "=" + format_value(v);
    if (parameter == "N_B" || parameter == "N_D") {
      const std::string domain = parameter == "N_B" ? "B" : "D";
      const int m = domain_index(c, domain);
      if (!(v >= 1.0) || v != std::floor(v)) throw InvalidArgument(parameter + " values must be integers >= 1");
      auto& d = c.domains[static_cast<std::size_t>(m)];
      if (d.initial.kind == DomainInitial::Kind::Mixed) {
        const double fidelity = d.initial.a + d.initial.b;
        const auto [a, b] = mixed_weights(fidelity, static_cast<int>(v), c.mixed_basis);
        d.initial.a = a;
        d.initial.b = b;
      }
      d.population = static_cast<int>(v);
    } else if (parameter == "T") {
      TemperatureSpec t = c.temperature.value_or(TemperatureSpec{});
      t.kelvin = v;
      c.temperature = t;
    } else if (parameter == "gamma_dep_over_gamma") {
      c.gamma_dep_over_gamma = v;
    } else {  // F_0
      bool any = false;
      for (auto& d : c.domains) {
        if (d.initial.kind != DomainInitial::Kind::Mixed) continue;
        const auto [a, b] = mixed_weights(v, d.population, c.mixed_basis);
        d.initial.a = a;
        d.initial.b = b;
        any = true;
      }
      if (!any) throw InvalidArgument("an F_0 sweep needs at least one mixed domain");
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where.empty() ? "config" : where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where.empty() ? std::string(key) : where + "." + key, "has the wrong type");
  }
}

DomainInitial initial_from_json(const json& j, const std::string& field, int population, MixedBasis basis) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "ground") return DomainInitial::ground();
    if (s == "excited") return DomainInitial::excited();
    fail(field, "expected 'ground', 'excited', {\"dicke\": k} or {\"mixed\": {...}}");
  }
  check_keys(j, field, {"dicke", "mixed"});
  if (j.size() != 1) fail(field, "exactly one of 'dicke' or 'mixed' is required");
  if (j.contains("dicke")) return DomainInitial::dicke(get_field<int>(j, "dicke", field, 0));
  const json& m = j.at("mixed");
  check_keys(m, field + ".mixed", {"a", "b", "fidelity"});
  if (m.contains("fidelity")) {
    if (m.contains("a") || m.contains("b")) fail(field + ".mixed", "give either fidelity or a and b");
    const auto [a, b] = mixed_weights(get_field<double>(m, "fidelity", field + ".mixed", 1.0), population, basis);
    return DomainInitial::mixed(a, b);
  }
  return DomainInitial::mixed(get_field<double>(m, "a", field + ".mixed", 1.0),
                              get_field<double>(m, "b", field + ".mixed", 0.0));
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  check_keys(j, "", {"name", "domains", "reservoirs", "nbar", "temperature", "include_individual",
                     "gamma_dep_over_gamma", "backend", "mixed_basis", "t_max", "sample_dt", "observables",
                     "run_to_steady", "steady_tol", "max_time"});
  ScenarioConfig c;
  c.name = get_field<std::string>(j, "name", "", c.name);
  if (c.name.empty()) fail("name", "must not be empty");

  const std::string basis_name = get_field<std::string>(j, "mixed_basis", "", "full");
  if (basis_name == "full")
    c.mixed_basis = MixedBasis::Full;
  else if (basis_name == "symmetric")
    c.mixed_basis = MixedBasis::Symmetric;
  else
    fail("mixed_basis", "expected 'full' or 'symmetric'");

  if (!j.contains("domains") || !j.at("domains").is_array()) fail("domains", "a list of domains is required");
  for (std::size_t i = 0; i < j.at("domains").size(); ++i) {
    const json& d = j.at("domains")[i];
    const std::string field = domain_field(i);
    check_keys(d, field, {"name", "population", "initial"});
    DomainSpec spec;
    spec.name = get_field<std::string>(d, "name", field, default_domain_name(i));
    if (!d.contains("population")) fail(field + ".population", "is required");
    spec.population = get_field<int>(d, "population", field, 1);
    if (d.contains("initial"))
      spec.initial = initial_from_json(d.at("initial"), field + ".initial", spec.population, c.mixed_basis);
    c.domains.push_back(std::move(spec));
  }

  if (j.contains("reservoirs")) {
    if (!j.at("reservoirs").is_array()) fail("reservoirs", "expected a list");
    for (std::size_t r = 0; r < j.at("reservoirs").size(); ++r) {
      const json& res = j.at("reservoirs")[r];
      const std::string field = "reservoirs[" + std::to_string(r) + "]";
      check_keys(res, field, {"domains", "rate"});
      ReservoirSpec spec;
      spec.rate = get_field<double>(res, "rate", field, 1.0);
      if (!res.contains("domains") || !res.at("domains").is_array()) fail(field + ".domains", "a list is required");
      for (const json& entry : res.at("domains")) {
        if (entry.is_string()) {
          try {
            spec.domains.push_back(domain_index(c, entry.get<std::string>()));
          } catch (const InvalidArgument&) {
            fail(field + ".domains", "unknown domain '" + entry.get<std::string>() + "'");
          }
        } else if (entry.is_number_integer()) {
          spec.domains.push_back(entry.get<int>());
        } else {
          fail(field + ".domains", "entries must be domain names or indices");
        }
      }
      c.reservoirs.push_back(std::move(spec));
    }
  }

  c.nbar = get_field<double>(j, "nbar", "", 0.0);
  if (j.contains("temperature")) {
    const json& t = j.at("temperature");
    check_keys(t, "temperature", {"kelvin", "omega0_over_2pi_hz"});
    if (!t.contains("kelvin")) fail("temperature.kelvin", "is required");
    if (j.contains("nbar")) fail("nbar", "give either nbar or a temperature block, not both");
    c.temperature = TemperatureSpec{get_field<double>(t, "kelvin", "temperature", 0.0),
                                    get_field<double>(t, "omega0_over_2pi_hz", "temperature", 10e9)};
  }
  c.include_individual = get_field<bool>(j, "include_individual", "", false);
  c.gamma_dep_over_gamma = get_field<double>(j, "gamma_dep_over_gamma", "", 0.0);
  const std::string backend = get_field<std::string>(j, "backend", "", "auto");
  if (backend == "auto")
    c.backend = BackendChoice::Auto;
  else if (backend == "collective")
    c.backend = BackendChoice::Collective;
  else if (backend == "full")
    c.backend = BackendChoice::Full;
  else
    fail("backend", "expected 'auto', 'collective' or 'full'");
  c.t_max = get_field<double>(j, "t_max", "", c.t_max);
  c.sample_dt = get_field<double>(j, "sample_dt", "", c.sample_dt);
  c.observables = get_field<std::vector<std::string>>(j, "observables", "", {});
  c.run_to_steady = get_field<bool>(j, "run_to_steady", "", false);
  c.steady_tol = get_field<double>(j, "steady_tol", "", c.steady_tol);
  c.max_time = get_field<double>(j, "max_time", "", c.max_time);
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["domains"] = json::array();
  for (const auto& d : c.domains) {
    json entry{{"name", d.name}, {"population", d.population}};
    switch (d.initial.kind) {
      case DomainInitial::Kind::Ground:
        entry["initial"] = "ground";
        break;
      case DomainInitial::Kind::Excited:
        entry["initial"] = "excited";
        break;
      case DomainInitial::Kind::Dicke:
        entry["initial"] = {{"dicke", d.initial.excitations}};
        break;
      case DomainInitial::Kind::Mixed:
        entry["initial"] = {{"mixed", {{"a", d.initial.a}, {"b", d.initial.b}}}};
        break;
    }
    j["domains"].push_back(entry);
  }
  j["reservoirs"] = json::array();
  for (const auto& r : c.reservoirs) {
    json names = json::array();
    for (int m : r.domains) names.push_back(c.domains.at(static_cast<std::size_t>(m)).name);
    j["reservoirs"].push_back({{"domains", names}, {"rate", r.rate}});
  }
  if (c.temperature)
    j["temperature"] = {{"kelvin", c.temperature->kelvin}, {"omega0_over_2pi_hz", c.temperature->omega0_over_2pi_hz}};
  else
    j["nbar"] = c.nbar;
  j["include_individual"] = c.include_individual;
  j["gamma_dep_over_gamma"] = c.gamma_dep_over_gamma;
  j["backend"] = c.backend == BackendChoice::Auto ? "auto" : c.backend == BackendChoice::Collective ? "collective" : "full";
  j["mixed_basis"] = c.mixed_basis == MixedBasis::Full ? "full" : "symmetric";
  j["t_max"] = c.t_max;
  j["sample_dt"] = c.sample_dt;
  j["observables"] = c.observables;
  j["run_to_steady"] = c.run_to_steady;
  j["steady_tol"] = c.steady_tol;
  j["max_time"] = c.max_time;
  return j;
}

}  // namespace qlre
