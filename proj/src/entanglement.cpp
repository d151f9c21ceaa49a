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

#include "qlre/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "qlre/errors.hpp"

namespace qlre {

namespace {

constexpr double kClipTol = 1e-10;

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

void require_qubits(const BasisDescriptor& basis, std::size_t count) {
  if (basis.num_domains() != count) throw InvalidArgument("expected " + std::to_string(count) + " qubit domains");
  for (Index d : basis.domain_dims())
    if (d != 2) throw InvalidArgument("every domain must be a single qubit");
}

double trace_norm_of_partial_transpose(const DensityMatrix& rho, const std::vector<int>& side) {
  const auto n = static_cast<int>(rho.basis().num_domains());
  if (side.empty() || static_cast<int>(side.size()) >= n) throw InvalidArgument("invalid bipartition");
  const CMatrix pt = partial_transpose(rho.matrix(), rho.basis(), side);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().sum();
}

}  // namespace

double concurrence(const CMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw InvalidArgument("concurrence needs a 4x4 two-qubit matrix");
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> rho_eig(herm);
  if (rho_eig.eigenvalues().minCoeff() < kEigenvalueFloor)
    throw NumericalFailure("concurrence input is not positive semidefinite");

  // sigma_y (x) sigma_y is anti-diagonal with entries (-1, 1, 1, -1).
  CMatrix flip = CMatrix::Zero(4, 4);
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const CMatrix tilde = flip * herm.conjugate() * flip;

  // rho * tilde shares its spectrum with sqrt(rho) tilde sqrt(rho), which is
  // Hermitian and so avoids defective eigenvalues for rank-deficient rho.
  const RVector clipped = rho_eig.eigenvalues().cwiseMax(0.0);
  const CMatrix root = rho_eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * rho_eig.eigenvectors().adjoint();
  const CMatrix r = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> r_eig(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);

  std::array<double, 4> lambda{};
  for (int i = 0; i < 4; ++i) {
    const double ev = r_eig.eigenvalues()(i);
    if (ev < -kClipTol) throw NumericalFailure("negative eigenvalue " + std::to_string(ev) + " in rho * rho~");
    lambda[i] = std::sqrt(std::max(ev, 0.0));
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

double concurrence(const DensityMatrix& rho) {
  require_qubits(rho.basis(), 2);
  return concurrence(rho.matrix());
}

double eof_from_concurrence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("concurrence must lie in [0, 1]");
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

double entanglement_of_formation(const CMatrix& rho) { return eof_from_concurrence(concurrence(rho)); }

double entanglement_of_formation(const DensityMatrix& rho) { return eof_from_concurrence(concurrence(rho)); }

CMatrix partial_transpose(const CMatrix& rho, const BasisDescriptor& basis, const std::vector<int>& domains) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) throw InvalidArgument("matrix does not match basis");
  const auto& dims = basis.domain_dims();
  std::vector<bool> flip(dims.size(), false);
  for (int m : domains) {
    if (m < 0 || m >= static_cast<int>(dims.size())) throw InvalidArgument("domain index out of range");
    if (flip[m]) throw InvalidArgument("duplicate domain index");
    flip[m] = true;
  }
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t m = dims.size(); m-- > 1;) strides[m - 1] = strides[m] * dims[m];

  const Index dim = basis.dim();
  CMatrix out(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      Index ti = i;
      Index tj = j;
      for (std::size_t m = 0; m < dims.size(); ++m) {
        if (!flip[m]) continue;
        const Index di = (i / strides[m]) % dims[m];
        const Index dj = (j / strides[m]) % dims[m];
        ti += (dj - di) * strides[m];
        tj += (di - dj) * strides[m];
      }
      out(ti, tj) = rho(i, j);
    }
  }
  return out;
}

double negativity(const DensityMatrix& rho, const std::vector<int>& side) {
  return std::max(0.0, 0.5 * (trace_norm_of_partial_transpose(rho, side) - 1.0));
}

double log_negativity(const DensityMatrix& rho, const std::vector<int>& side) {
  return std::max(0.0, std::log2(trace_norm_of_partial_transpose(rho, side)));
}

double tripartite_negativity(const DensityMatrix& rho) {
  require_qubits(rho.basis(), 3);
  const double product = negativity(rho, {0}) * negativity(rho, {1}) * negativity(rho, {2});
  return product > 0.0 ? std::cbrt(product) : 0.0;
}

EntanglementReport two_qubit_report(const DensityMatrix& rho) {
  EntanglementReport report;
  report.concurrence = concurrence(rho);
  report.eof = eof_from_concurrence(report.concurrence);
  report.negativity = negativity(rho, {0});
  report.log_negativity = log_negativity(rho, {0});
  return report;
}

}  // namespace qlre
