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


#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qlre/dynamics.hpp"
#include "qlre/entanglement.hpp"
#include "qlre/errors.hpp"
#include "qlre/oracle.hpp"
#include "support.hpp"

using namespace qlre;
using qlre::test::max_abs;

namespace {

DensityMatrix chain_state(Backend backend, int n_b, int a, int b, int c) {
  const BasisDescriptor basis(backend, {1, n_b, 1});
  return product_state(basis, {LocalState{DickeLevel{a}}, LocalState{DickeLevel{b}}, LocalState{DickeLevel{c}}});
}

MasterEquation chain(Backend backend, int n_b) {
  return build_collective_zero_T(BasisDescriptor(backend, {1, n_b, 1}), chain_reservoirs(3));
}

Observable jz_sum(const BasisDescriptor& basis) {
  Operator total = embed(collective_jz(basis.populations()[0], basis.backend()), basis, 0);
  SparseMatrix sum = total.matrix();
  for (std::size_t m = 1; m < basis.num_domains(); ++m)
    sum += embed(collective_jz(basis.populations()[m], basis.backend()), basis, static_cast<int>(m)).matrix();
  const Operator op(sum, basis);
  return {"jz_sum", [op](const DensityMatrix& rho) { return expectation(rho, op); }};
}

}  // namespace

TEST_CASE("reservoir geometries") {
  CHECK(chain_reservoirs(3).size() == 2);
  CHECK(chain_reservoirs(3)[1].domains == std::vector<int>{1, 2});
  const auto star = star_reservoirs(3, {0, 1, 2});
  REQUIRE(star.size() == 3);
  for (int leaf = 0; leaf < 3; ++leaf) CHECK(star[static_cast<std::size_t>(leaf)].domains == std::vector<int>{leaf, 3});
  CHECK(chain(Backend::Collective, 2).terms().size() == 2);
}

TEST_CASE("term counts of the realistic equation") {
  const BasisDescriptor basis(Backend::Full, {1, 1, 1});
  const auto reservoirs = chain_reservoirs(3);
  const MasterEquation zero = build_collective_zero_T(basis, reservoirs);
  const MasterEquation same = build_realistic(basis, reservoirs, 0.0, false, 0.0);
  REQUIRE(same.terms().size() == zero.terms().size());
  for (std::size_t k = 0; k < zero.terms().size(); ++k) {
    CHECK(same.terms()[k].rate == zero.terms()[k].rate);
    CHECK(max_abs(CMatrix(same.terms()[k].jump.matrix() - zero.terms()[k].jump.matrix())) == 0.0);
  }
  CHECK(build_realistic(basis, reservoirs, 0.2, false, 0.0).terms().size() == 4);
  CHECK(build_realistic(basis, reservoirs, 0.2, true, 0.1).terms().size() == 13);
  CHECK_THROWS_AS(build_realistic(basis.with_backend(Backend::Collective), reservoirs, 0.0, true, 0.0),
                  UnsupportedConfiguration);
  CHECK_THROWS_AS(build_realistic(basis, reservoirs, -1.0, false, 0.0), InvalidArgument);
}

TEST_CASE("ground state and dark states are stationary") {
  for (auto backend : {Backend::Collective, Backend::Full}) {
    const auto eq = chain(backend, 3);
    CHECK(max_abs(lindblad_rhs(eq, chain_state(backend, 3, 0, 0, 0))) == 0.0);
  }
  for (int n_b = 1; n_b <= 6; ++n_b) {
    const auto full = DensityMatrix::from_pure(dark_state(n_b));
    CHECK(lindblad_rhs(chain(Backend::Full, n_b), full).norm() < 1e-12);
    const auto coll = DensityMatrix::from_pure(to_collective(dark_state(n_b)));
    CHECK(lindblad_rhs(chain(Backend::Collective, n_b), coll).norm() < 1e-12);
  }
}

TEST_CASE("single spin decays as exp(-gamma t)") {
  const BasisDescriptor basis = test::qubits(1);
  const MasterEquation eq(basis, {{collective_lowering(1, Backend::Collective), 1.0}});
  const DensityMatrix up = product_state(basis, {LocalState{DickeLevel{1}}});
  const Operator proj(SparseMatrix(CMatrix(CVector{{1.0, 0.0}}.asDiagonal()).sparseView()), basis);
  EvolveOptions options;
  options.observables = {{"p_up", [&](const DensityMatrix& rho) { return expectation(rho, proj); }}};
  const auto traj = evolve(eq, up, 3.0, 0.25, options);
  const auto& p = traj.series("p_up");
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - std::exp(-2.0 * traj.times[i])) < 1e-9);
  CHECK(traj.times.back() == 3.0);
  CHECK_THROWS_AS(traj.series("missing"), InvalidArgument);
}

TEST_CASE("an equation without terms leaves the state alone") {
  const BasisDescriptor basis = test::qubits(2);
  const MasterEquation eq(basis, {});
  const DensityMatrix rho(test::random_density(4), basis);
  const auto traj = evolve(eq, rho, 1.0, 0.5, {{}, {}, {0, 1}});
  CHECK(traj.snapshots.size() == 3);
  for (const auto& s : traj.snapshots) CHECK(max_abs(s.matrix() - rho.matrix()) < 1e-15);
}

TEST_CASE("property: rhs is Hermitian and traceless") {
  for (auto backend : {Backend::Collective, Backend::Full}) {
    const BasisDescriptor basis(backend, {1, 2, 1});
    const MasterEquation eq = build_realistic(basis, chain_reservoirs(3), 0.3, backend == Backend::Full,
                                              backend == Backend::Full ? 0.1 : 0.0);
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho(test::random_density(basis.dim()), basis);
      const CMatrix out = lindblad_rhs(eq, rho);
      CHECK(max_abs(out - out.adjoint()) < 1e-12);
      CHECK(std::abs(out.trace()) < 1e-12);
    }
  }
}

TEST_CASE("packed block storage agrees with the dense generator") {
  const auto eq = chain(Backend::Full, 3);
  REQUIRE(eq.has_excitation_blocks());
  // Block diagonal: a random state dephased in the excitation number.
  const BasisDescriptor basis = eq.basis();
  CMatrix rho = test::random_density(basis.dim());
  auto excitations = [&](Index i) {
    int up = 0;
    for (int bit = 0; bit < 5; ++bit) up += ((i >> bit) & 1) == 0;
    return up;
  };
  for (Index r = 0; r < rho.rows(); ++r)
    for (Index c = 0; c < rho.cols(); ++c)
      if (excitations(r) != excitations(c)) rho(r, c) = 0.0;
  rho /= rho.trace().real();
  REQUIRE(eq.is_block_diagonal(rho));
  const CMatrix packed = eq.pack(rho);
  CHECK(max_abs(eq.unpack(packed) - rho) == 0.0);
  CHECK(std::abs(eq.packed_trace(packed) - rho.trace()) < 1e-14);

  CMatrix dense_out(rho.rows(), rho.cols()), packed_out(packed.rows(), packed.cols());
  eq.apply(rho, dense_out);
  eq.apply_packed(packed, packed_out);
  CHECK(max_abs(eq.unpack(packed_out) - dense_out) < 1e-14);
  CHECK(eq.packed_asymmetry(packed_out) < 1e-14);

  // Integration through either path: a 1e-30 coherence forces the dense one.
  CMatrix nudged = rho;
  nudged(0, 1) += 1e-30;
  nudged(1, 0) += 1e-30;
  CHECK_FALSE(eq.is_block_diagonal(nudged));
  const auto a = evolve(eq, DensityMatrix(rho, basis), 2.0, 1.0, {{}, {}, {0, 1, 2}});
  const auto b = evolve(eq, DensityMatrix(nudged, basis), 2.0, 1.0, {{}, {}, {0, 1, 2}});
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    CHECK(trace_distance(a.snapshots[i].matrix(), b.snapshots[i].matrix()) < 1e-9);

  // Each jump only needs its own fixed shift: dephasing 0, raising +1.
  CHECK(build_realistic(basis, chain_reservoirs(3), 0.1, true, 0.1).has_excitation_blocks());
  const Operator lower = reservoir_jump(basis, {0, 1});
  const Operator x(SparseMatrix(lower.matrix() + lower.adjoint().matrix()), basis);
  CHECK_FALSE(MasterEquation(basis, {{x, 1.0}}).has_excitation_blocks());
}

TEST_CASE("property: evolution keeps rho a density matrix") {
  const BasisDescriptor basis(Backend::Full, {1, 2, 1});
  const MasterEquation eq = build_realistic(basis, chain_reservoirs(3), 0.2, true, 0.05);
  for (int trial = 0; trial < 3; ++trial) {
    const DensityMatrix rho(test::random_density(basis.dim(), 2), basis);
    const auto traj = evolve(eq, rho, 2.0, 0.5, {{}, {}, {0, 1, 2}});
    for (const auto& s : traj.snapshots) {
      CHECK(std::abs(s.matrix().trace() - Complex(1.0)) < kTraceTol);
      CHECK_NOTHROW(validate_density_matrix(s.matrix()));
    }
  }
}

TEST_CASE("intro pair rises monotonically to 0.354 ebits") {
  const BasisDescriptor basis = test::qubits(2);
  const MasterEquation eq = build_collective_zero_T(basis, {{{0, 1}, 1.0}});
  const DensityMatrix start = product_state(basis, {LocalState{DickeLevel{1}}, LocalState{DickeLevel{0}}});
  EvolveOptions options;
  options.observables = {{"eof", [](const DensityMatrix& rho) { return entanglement_of_formation(rho); }}};
  const auto traj = evolve(eq, start, 8.0, 0.1, options);
  const auto& e = traj.series("eof");
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] >= e[i - 1] - 1e-8);
  CHECK(e.back() == doctest::Approx(0.354).epsilon(0.001 / 0.354));
}

TEST_CASE("middle-domain relaxation speeds up with population") {
  double previous = 1e9;
  for (int n_b : {3, 6, 12}) {
    const auto eq = chain(Backend::Collective, n_b);
    const auto start = chain_state(Backend::Collective, n_b, 0, n_b, 0);
    const Operator jz = embed(collective_jz(n_b, Backend::Collective), eq.basis(), 1);
    EvolveOptions options;
    options.observables = {{"drop", [&](const DensityMatrix& rho) { return 0.5 - expectation(rho, jz) / n_b; }}};
    const auto traj = evolve(eq, start, 6.0, 0.01, options);
    const double t_half = half_max_time(traj.series("drop"), traj.times);
    CHECK(t_half < previous);
    previous = t_half;
  }
}

TEST_CASE("property: total Jz never increases at zero temperature") {
  std::uniform_int_distribution<int> level(0, 3);
  for (int trial = 0; trial < 6; ++trial) {
    const BasisDescriptor basis(Backend::Collective, {1, 3, 1});
    const int a = level(test::rng()) % 2, b = level(test::rng()), c = level(test::rng()) % 2;
    const DensityMatrix start =
        product_state(basis, {LocalState{DickeLevel{a}}, LocalState{DickeLevel{b}}, LocalState{DickeLevel{c}}});
    EvolveOptions options;
    options.observables = {jz_sum(basis)};
    const auto traj = evolve(build_collective_zero_T(basis, chain_reservoirs(3)), start, 4.0, 0.05, options);
    const auto& s = traj.series("jz_sum");
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] <= s[i - 1] + 1e-10);
  }
}

TEST_CASE("steady state") {
  SUBCASE("ground input returns at once") {
    const auto result = steady_state(chain(Backend::Collective, 4), chain_state(Backend::Collective, 4, 0, 0, 0));
    CHECK(result.elapsed_scaled_time == 0.0);
    CHECK(result.residual == 0.0);
  }
  SUBCASE("chain with N_B = 12 reaches 0.315 ebits") {
    const auto result = steady_state(chain(Backend::Collective, 12), chain_state(Backend::Collective, 12, 0, 12, 0));
    CHECK(result.residual < 1e-10);
    CHECK(entanglement_of_formation(partial_trace(result.rho, {0, 2})) == doctest::Approx(0.315).epsilon(0.005 / 0.315));
  }
  SUBCASE("N_B = 2 from |u>|dd>|d> gives 3/5 ground + 2/5 dark state") {
    const auto result = steady_state(chain(Backend::Full, 2), chain_state(Backend::Full, 2, 1, 0, 0));
    CMatrix expected = 0.4 * test::projector(dark_state(2).amplitudes());
    expected(15, 15) += 0.6;
    CHECK(trace_distance(result.rho.matrix(), expected) < 1e-8);
  }
  SUBCASE("max_time exhaustion is reported") {
    SteadyStateOptions options;
    options.max_time = 0.1;
    CHECK_THROWS_AS(steady_state(chain(Backend::Collective, 3), chain_state(Backend::Collective, 3, 0, 3, 0), options),
                    ConvergenceFailure);
  }
}

TEST_CASE("expectation values") {
  const BasisDescriptor one = test::qubits(1);
  const DensityMatrix down = product_state(one, {LocalState{DickeLevel{0}}});
  CHECK(expectation(down, collective_jz(1, Backend::Collective)) == doctest::Approx(-0.5));
  const BasisDescriptor b(Backend::Collective, {5});
  const DensityMatrix up = product_state(b, {LocalState{DickeLevel{5}}});
  CHECK(expectation(up, collective_jz(5, Backend::Collective)) / 5 == doctest::Approx(0.5));
}

TEST_CASE("half-max time interpolates the first crossing") {
  const std::vector<double> times{0, 1, 2};
  CHECK(half_max_time(std::vector<double>{0, 1, 1}, times) == doctest::Approx(0.5));
  std::vector<double> ramp, grid;
  for (int i = 0; i <= 10; ++i) {
    grid.push_back(i / 10.0);
    ramp.push_back(i / 10.0);
  }
  CHECK(half_max_time(ramp, grid) == doctest::Approx(0.5));
  // Ties resolve to the first crossing.
  CHECK(half_max_time(std::vector<double>{0, 1, 0, 1}, std::vector<double>{0, 1, 2, 3}) == doctest::Approx(0.5));
  CHECK_THROWS(half_max_time(std::vector<double>{1, 2}, std::vector<double>{0}));
}
