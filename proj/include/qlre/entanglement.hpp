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

#include <optional>
#include <vector>

#include "qlre/hilbert.hpp"

namespace qlre {

struct EntanglementReport {
  double concurrence = 0.0;
  double eof = 0.0;  // ebits
  std::optional<double> negativity;
  std::optional<double> log_negativity;
};

/// Wootters concurrence of a two-qubit state (both domains of dimension 2).
double concurrence(const DensityMatrix& rho);
double concurrence(const CMatrix& rho);

/// E(C) = h((1 + sqrt(1 - C^2)) / 2) with h the binary entropy in bits.
double eof_from_concurrence(double c);

double entanglement_of_formation(const DensityMatrix& rho);
double entanglement_of_formation(const CMatrix& rho);

/// Partial transpose of the tensor factors listed in `domains`.
CMatrix partial_transpose(const CMatrix& rho, const BasisDescriptor& basis, const std::vector<int>& domains);

/// (||rho^T_side||_1 - 1) / 2 for the bipartition `side` | rest.
double negativity(const DensityMatrix& rho, const std::vector<int>& side);
/// log2 ||rho^T_side||_1, zero for PPT states.
double log_negativity(const DensityMatrix& rho, const std::vector<int>& side);

/// Geometric mean of the three one-versus-two negativities of a three-qubit
/// state.
double tripartite_negativity(const DensityMatrix& rho);

/// Concurrence, EoF and the A|B negativities of a two-qubit state.
EntanglementReport two_qubit_report(const DensityMatrix& rho);

}  // namespace qlre
