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

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "qlre/types.hpp"

namespace qlre {

/// How a domain of N spin-1/2 particles is represented.
///
/// Collective keeps only the maximal-j symmetric subspace (dimension N+1),
/// ordered by Dicke level descending from m = +N/2. Full keeps all 2^N
/// product states, ordered lexicographically over bitstrings with the first
/// spin most significant and up encoded as 0 (so index 0 is all-up).
enum class Backend { Collective, Full };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

/// Hilbert dimension of one domain of `population` spins in `backend`.
Index domain_dimension(Backend backend, int population);

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kEigenvalueFloor = -1e-9;
inline constexpr double kNormTol = 1e-12;

class BasisDescriptor {
 public:
  BasisDescriptor(Backend backend, std::vector<int> populations);

  Backend backend() const noexcept { return backend_; }
  const std::vector<int>& populations() const noexcept { return populations_; }
  const std::vector<Index>& domain_dims() const noexcept { return dims_; }
  std::size_t num_domains() const noexcept { return populations_.size(); }
  Index dim() const noexcept { return total_; }
  int total_spins() const noexcept;

  /// Basis over the listed domains (sorted ascending), same backend.
  BasisDescriptor subsystem(const std::vector<int>& keep) const;
  BasisDescriptor with_backend(Backend backend) const;

  bool operator==(const BasisDescriptor& other) const = default;

 private:
  Backend backend_;
  std::vector<int> populations_;
  std::vector<Index> dims_;
  Index total_ = 1;
};

class Operator {
 public:
  Operator(SparseMatrix matrix, BasisDescriptor basis);

  const SparseMatrix& matrix() const noexcept { return matrix_; }
  const BasisDescriptor& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return matrix_.rows(); }
  CMatrix dense() const { return CMatrix(matrix_); }
  Operator adjoint() const;

 private:
  SparseMatrix matrix_;
  BasisDescriptor basis_;
};

class PureState {
 public:
  /// Throws InvalidArgument unless the vector has unit norm.
  PureState(CVector amplitudes, BasisDescriptor basis);
  static PureState normalized(CVector amplitudes, BasisDescriptor basis);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  const BasisDescriptor& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return amplitudes_.size(); }

 private:
  CVector amplitudes_;
  BasisDescriptor basis_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  DensityMatrix(CMatrix matrix, BasisDescriptor basis);

  /// Skips validation; for integrator output whose drift is monitored
  /// separately.
  static DensityMatrix unchecked(CMatrix matrix, BasisDescriptor basis);
  static DensityMatrix from_pure(const PureState& psi);

  const CMatrix& matrix() const noexcept { return matrix_; }
  const BasisDescriptor& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return matrix_.rows(); }

 private:
  struct NoCheck {};
  DensityMatrix(CMatrix matrix, BasisDescriptor basis, NoCheck);

  CMatrix matrix_;
  BasisDescriptor basis_;
};

/// Throws InvalidArgument naming the violated invariant.
void validate_density_matrix(const CMatrix& rho);

// Local state descriptors for product_state.

/// Symmetric Dicke state with `excitations` spins up (k = m + N/2).
struct DickeLevel {
  int excitations = 0;
};

/// Explicit per-spin configuration; Full backend only.
struct Bitstring {
  std::vector<bool> up;
};

using LocalPure = std::variant<DickeLevel, Bitstring>;
using LocalState = std::variant<DickeLevel, Bitstring, CMatrix>;

inline DickeLevel ground_level() { return DickeLevel{0}; }
inline DickeLevel excited_level(int population) { return DickeLevel{population}; }

Operator collective_lowering(int population, Backend backend);
Operator collective_raising(int population, Backend backend);
Operator collective_jz(int population, Backend backend);

enum class PauliKind { Lowering, Raising, Z };

/// Single-spin Pauli operator on spin `spin` of domain `domain`, embedded in
/// the full product space. Full backend only.
Operator single_spin_operator(const BasisDescriptor& basis, int domain, int spin,
                              PauliKind kind);

/// op on domain `domain`, identity on every other tensor factor.
Operator embed(const Operator& op, const BasisDescriptor& basis, int domain);
Operator embed(const SparseMatrix& op, const BasisDescriptor& basis, int domain);

/// Sum of the embedded collective lowering operators of `domains`.
Operator reservoir_jump(const BasisDescriptor& basis, const std::vector<int>& domains);

CVector local_vector(Backend backend, int population, const LocalPure& level);
PureState product_pure_state(const BasisDescriptor& basis, const std::vector<LocalPure>& levels);
DensityMatrix product_state(const BasisDescriptor& basis, const std::vector<LocalState>& levels);

/// Reduced state over `keep` (any order, no duplicates); factors stay in
/// declaration order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
CMatrix partial_trace(const CMatrix& rho, const BasisDescriptor& basis, const std::vector<int>& keep);

double fidelity_with_pure(const DensityMatrix& rho, const PureState& psi);

/// 1/2 sum of |eigenvalues| of (a - b).
double trace_distance(const CMatrix& a, const CMatrix& b);

// Collective <-> Full maps. The isometry sends Dicke level i of the
// symmetric subspace to the normalized symmetric superposition.

CMatrix symmetric_isometry(int population);
SparseMatrix collective_to_full_map(const BasisDescriptor& collective);
DensityMatrix to_full(const DensityMatrix& rho);
PureState to_full(const PureState& psi);
/// Projects onto the symmetric subspace; throws InvalidArgument if the state
/// has weight outside it above 1e-10.
PureState to_collective(const PureState& psi);
Operator to_collective(const Operator& op);

}  // namespace qlre
