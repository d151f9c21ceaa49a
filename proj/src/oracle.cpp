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


#include "qlre/oracle.hpp"

#include <cmath>
#include <initializer_list>

#include "qlre/errors.hpp"

namespace qlre {
namespace {

void require_population(int n_b) {
  if (n_b < 1) throw InvalidArgument("N_B must be >= 1");
  if (n_b > 28) throw InvalidArgument("N_B too large for an explicit Full-backend vector");
}

// Index of the bitstring with exactly the listed spins up (up encodes as 0,
// first spin most significant).
Index index_with_up(int num_spins, std::initializer_list<int> up) {
  Index index = (Index{1} << num_spins) - 1;
  for (int s : up) index -= Index{1} << (num_spins - 1 - s);
  return index;
}

// a |u,d..d,d> + c |d,d..d,u> + b sum_j |d,d..u_j..d,d>
PureState chain_vector(int n_b, double a, double b, double c, double norm) {
  const BasisDescriptor basis(Backend::Full, {1, n_b, 1});
  const int n = n_b + 2;
  CVector v = CVector::Zero(basis.dim());
  v(index_with_up(n, {0})) = a * norm;
  v(index_with_up(n, {n - 1})) = c * norm;
  for (int j = 1; j <= n_b; ++j) v(index_with_up(n, {j})) = b * norm;
  return PureState(std::move(v), basis);
}

}  // namespace

PureState dark_state(int n_b) {
  require_population(n_b);
  const double nb = n_b;
  return chain_vector(n_b, 1.0, -1.0 / nb, 1.0, std::sqrt(nb / (2.0 * nb + 1.0)));
}

PureState psi_1(int n_b) {
  require_population(n_b);
  return chain_vector(n_b, 1.0, 2.0, 1.0, 1.0 / std::sqrt(2.0 + 4.0 * n_b));
}

PureState psi_2(int n_b) {
  require_population(n_b);
  return chain_vector(n_b, 1.0, 0.0, -1.0, 1.0 / std::sqrt(2.0));
}

PureState psi_d2() {
  const BasisDescriptor basis(Backend::Full, {1, 2, 1});
  CVector v = CVector::Zero(basis.dim());
  v(index_with_up(4, {1})) = 1.0 / std::sqrt(2.0);
  v(index_with_up(4, {2})) = -1.0 / std::sqrt(2.0);
  return PureState(std::move(v), basis);
}

DarkStateFamily dark_state_family(int n_b) { return {n_b, dark_state(n_b), psi_1(n_b), psi_2(n_b)}; }

double x_dark(int n_b) {
  if (n_b < 1) throw InvalidArgument("N_B must be >= 1");
  const double nb = n_b;
  return nb / (2.0 * nb + 1.0);
}

double x_reduced(int n_b) {
  if (n_b < 1) throw InvalidArgument("N_B must be >= 1");
  const double nb = n_b;
  return 2.0 * nb * nb / ((2.0 * nb + 1.0) * (2.0 * nb + 1.0));
}

double concurrence_analytic(int n_b) { return x_reduced(n_b); }

DensityMatrix chain_dark_steady(int n_b) {
  const PureState psi = dark_state(n_b);
  const double x = x_dark(n_b);
  CMatrix rho = x * psi.amplitudes() * psi.amplitudes().adjoint();
  rho(rho.rows() - 1, rho.cols() - 1) += 1.0 - x;
  return DensityMatrix(std::move(rho), psi.basis());
}

DensityMatrix psi_plus_ground_mixture(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("mixture weight must lie in [0, 1]");
  const PureState plus = bell_psi_plus();
  CMatrix rho = x * plus.amplitudes() * plus.amplitudes().adjoint();
  rho(3, 3) += 1.0 - x;
  return DensityMatrix(std::move(rho), plus.basis());
}

DensityMatrix intro_pair_steady() {
  const PureState minus = bell_psi_minus();
  CMatrix rho = 0.5 * minus.amplitudes() * minus.amplitudes().adjoint();
  rho(3, 3) += 0.5;
  return DensityMatrix(std::move(rho), minus.basis());
}

PureState bell_psi_minus() {
  CVector v = CVector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return PureState(std::move(v), BasisDescriptor(Backend::Full, {1, 1}));
}

PureState bell_psi_plus() {
  CVector v = CVector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v), BasisDescriptor(Backend::Full, {1, 1}));
}

PureState ghz_state() {
  CVector v = CVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v), BasisDescriptor(Backend::Full, {1, 1, 1}));
}

PureState w_state() {
  CVector v = CVector::Zero(8);
  v(3) = v(5) = v(6) = 1.0 / std::sqrt(3.0);
  return PureState(std::move(v), BasisDescriptor(Backend::Full, {1, 1, 1}));
}

TripartiteDecomposition tripartite_decompose(const CMatrix& rho) {
  if (rho.rows() != 8 || rho.cols() != 8) throw InvalidArgument("tripartite decomposition needs an 8x8 matrix");
  const CVector w = w_state().amplitudes();
  TripartiteDecomposition out;
  out.c_ground = rho(7, 7).real();
  out.c_w = w.dot(rho * w).real();
  CMatrix remainder = rho - out.c_w * w * w.adjoint();
  remainder(7, 7) -= out.c_ground;
  out.residual = remainder.norm();
  return out;
}

TripartiteDecomposition tripartite_decompose(const DensityMatrix& rho) {
  for (Index d : rho.basis().domain_dims())
    if (d != 2) throw InvalidArgument("tripartite decomposition needs three single-spin domains");
  return tripartite_decompose(rho.matrix());
}

}  // namespace qlre
