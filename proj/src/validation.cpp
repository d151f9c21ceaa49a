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


#include "qlre/validation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "qlre/dynamics.hpp"
#include "qlre/entanglement.hpp"
#include "qlre/errors.hpp"
#include "qlre/oracle.hpp"

namespace qlre {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Runs `body`, which reports (passed, detail); exceptions count as failures.
void check(std::vector<CheckResult>& out, const std::string& name,
           const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [passed, detail] = body();
    out.push_back({name, passed, detail});
  } catch (const std::exception& e) {
    out.push_back({name, false, std::string("exception: ") + e.what()});
  }
}

std::pair<bool, std::string> within(double value, double expected, double tol) {
  const double err = std::abs(value - expected);
  return {err <= tol, "value " + sci(value) + ", expected " + sci(expected) + ", error " + sci(err)};
}

MasterEquation chain_equation(Backend backend, int n_b) {
  const BasisDescriptor basis(backend, {1, n_b, 1});
  return build_collective_zero_T(basis, chain_reservoirs(3));
}

}  // namespace

int validation_cap(ValidationScale scale) { return scale == ValidationScale::Quick ? 5 : 8; }

std::vector<CheckResult> run_validation(ValidationScale scale) {
  std::vector<CheckResult> out;
  const int cap = validation_cap(scale);

  check(out, "measure.bell_negativity", [] {
    return within(negativity(DensityMatrix::from_pure(bell_psi_minus()), {0}), 0.5, 1e-12);
  });
  check(out, "measure.w_tripartite_negativity", [] {
    return within(tripartite_negativity(DensityMatrix::from_pure(w_state())), std::sqrt(2.0) / 3.0, 1e-9);
  });
  check(out, "measure.ghz_tripartite_negativity", [] {
    return within(tripartite_negativity(DensityMatrix::from_pure(ghz_state())), 0.5, 1e-12);
  });
  check(out, "measure.eof_half_concurrence", [] { return within(eof_from_concurrence(0.5), 0.354, 1e-3); });
  check(out, "measure.concurrence_grid", [] {
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double x = i / 10.0;
      worst = std::max(worst, std::abs(concurrence(psi_plus_ground_mixture(x)) - x));
    }
    return std::pair{worst <= 1e-12, "max |C - x| " + sci(worst)};
  });
  check(out, "oracle.x_formulas", [] {
    const double err = std::abs(x_dark(2) - 0.4) + std::abs(x_reduced(2) - 0.32) + std::abs(x_dark(1) - 1.0 / 3.0);
    return std::pair{err < 1e-15, "combined error " + sci(err)};
  });
  check(out, "oracle.intro_pair", [] {
    const BasisDescriptor basis(Backend::Collective, {1, 1});
    const MasterEquation eq = build_collective_zero_T(basis, {{{0, 1}, 1.0}});
    const auto steady = steady_state(eq, product_state(basis, {excited_level(1), ground_level()}));
    const double d = trace_distance(steady.rho.matrix(), intro_pair_steady().matrix());
    return std::pair{d < 1e-8, "trace distance " + sci(d)};
  });

  for (int n_b = 1; n_b <= cap; ++n_b) {
    const std::string tag = "[N_B=" + std::to_string(n_b) + "]";
    check(out, "oracle.dark_state_stationary" + tag, [n_b] {
      const DensityMatrix full = DensityMatrix::from_pure(dark_state(n_b));
      const DensityMatrix collective = DensityMatrix::from_pure(to_collective(dark_state(n_b)));
      const double a = lindblad_rhs(chain_equation(Backend::Full, n_b), full).norm();
      const double b = lindblad_rhs(chain_equation(Backend::Collective, n_b), collective).norm();
      return std::pair{a < 1e-10 && b < 1e-10, "full " + sci(a) + ", collective " + sci(b)};
    });
    check(out, "oracle.chain_steady_state" + tag, [n_b] {
      const MasterEquation eq = chain_equation(Backend::Collective, n_b);
      const DensityMatrix rho0 =
          product_state(eq.basis(), {excited_level(1), ground_level(), ground_level()});
      const auto steady = steady_state(eq, rho0);
      const DensityMatrix full = to_full(steady.rho);
      const double d = trace_distance(full.matrix(), chain_dark_steady(n_b).matrix());
      const double weight = fidelity_with_pure(full, dark_state(n_b));
      const double c = concurrence(partial_trace(full, {0, 2}));
      const bool ok = d < 1e-7 && std::abs(weight - x_dark(n_b)) < 1e-7 &&
                      std::abs(c - concurrence_analytic(n_b)) < 1e-6;
      return std::pair{ok, "trace distance " + sci(d) + ", dark weight error " +
                               sci(std::abs(weight - x_dark(n_b))) + ", concurrence error " +
                               sci(std::abs(c - concurrence_analytic(n_b)))};
    });
    if (n_b > 5) continue;
    check(out, "backend.equivalence" + tag, [n_b] {
      double worst = 0.0;
      for (int variant = 0; variant < 2; ++variant) {
        std::vector<LocalState> levels = variant == 0
                                             ? std::vector<LocalState>{ground_level(), excited_level(n_b), ground_level()}
                                             : std::vector<LocalState>{excited_level(1), ground_level(), ground_level()};
        const MasterEquation collective = chain_equation(Backend::Collective, n_b);
        const MasterEquation full = chain_equation(Backend::Full, n_b);
        EvolveOptions options;
        options.keep = {0, 2};
        const auto a = evolve(collective, product_state(collective.basis(), levels), 4.0, 0.5, options);
        const auto b = evolve(full, product_state(full.basis(), levels), 4.0, 0.5, options);
        for (std::size_t i = 0; i < a.snapshots.size(); ++i)
          worst = std::max(worst, trace_distance(a.snapshots[i].matrix(), b.snapshots[i].matrix()));
      }
      return std::pair{worst < 1e-8, "max snapshot trace distance " + sci(worst)};
    });
  }
  return out;
}

}  // namespace qlre
