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


// Helpers shared by the unit tests: seeded random states and small
// comparison utilities.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include "qlre/hilbert.hpp"

namespace qlre::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260417);
  return engine;
}

inline CMatrix random_matrix(Index rows, Index cols) {
  std::normal_distribution<double> normal;
  CMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = Complex(normal(rng()), normal(rng()));
  return m;
}

/// G G^+ / tr, full rank with probability one.
inline CMatrix random_density(Index dim, Index rank = -1) {
  const CMatrix g = random_matrix(dim, rank < 0 ? dim : rank);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline CVector random_pure(Index dim) {
  CVector v = random_matrix(dim, 1).col(0);
  return v / v.norm();
}

/// Random unitary from the Q factor of a Gaussian matrix.
inline CMatrix random_unitary(Index dim) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(dim, dim));
  return qr.householderQ() * CMatrix::Identity(dim, dim);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

inline BasisDescriptor qubits(int n, Backend backend = Backend::Collective) {
  return BasisDescriptor(backend, std::vector<int>(static_cast<std::size_t>(n), 1));
}

}  // namespace qlre::test
