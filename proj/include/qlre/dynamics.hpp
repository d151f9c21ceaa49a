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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlre/hilbert.hpp"
#include "qlre/integrator.hpp"

namespace qlre {

/// One rate * D[jump] contribution. Rates are in units of gamma/2, the
/// scale that makes the dissipator dimensionless in scaled time gamma t / 2.
struct LindbladTerm {
  Operator jump;
  double rate = 1.0;
};

/// Immutable Lindblad generator
///   d rho / d tau = sum_k rate_k (2 O_k rho O_k^+ - O_k^+ O_k rho - rho O_k^+ O_k)
/// with tau = gamma t / 2.
class MasterEquation {
 public:
  MasterEquation(BasisDescriptor basis, std::vector<LindbladTerm> terms);

  const BasisDescriptor& basis() const noexcept { return basis_; }
  const std::vector<LindbladTerm>& terms() const noexcept { return terms_; }

  /// out = d rho / d tau. Assumes rho is Hermitian.
  void apply(const CMatrix& rho, CMatrix& out) const;

  /// Upper bound on the spectral radius of the generator, from induced
  /// 1- and infinity-norms of the jump operators.
  double spectral_bound() const noexcept { return spectral_bound_; }

  // Excitation-block fast path. When every jump changes the number of up
  // spins by a fixed amount, states that are block diagonal in that number
  // stay so, and only the diagonal blocks need storing and updating. The
  // packed form stacks those blocks column-major into a single column.

  /// True when every jump has a definite excitation change.
  bool has_excitation_blocks() const noexcept { return blocked_; }
  /// True when rho has exactly zero coherence between excitation sectors.
  bool is_block_diagonal(const CMatrix& rho) const;
  CMatrix pack(const CMatrix& rho) const;
  CMatrix unpack(const CMatrix& packed) const;
  /// apply() on packed states.
  void apply_packed(const CMatrix& packed, CMatrix& out) const;
  Complex packed_trace(const CMatrix& packed) const;
  double packed_asymmetry(const CMatrix& packed) const;
  void symmetrize_packed(CMatrix& packed) const;

 private:
  struct Sector {
    int excitation = 0;
    Index begin = 0;   // first position in excitation order
    Index size = 0;
    Index offset = 0;  // start of the block in the packed column
  };
  // Per jump: the sector each target sector is fed from, and where the
  // corresponding off-diagonal block lives in scratch storage.
  struct Coupling {
    std::vector<int> source;  // -1 when no source sector exists
    std::vector<Index> offset;
    Index scratch = 0;
  };

  void build_blocks();

  BasisDescriptor basis_;
  std::vector<LindbladTerm> terms_;
  std::vector<SparseMatrix> jumps_;
  std::vector<SparseMatrix> adjoints_;
  SparseMatrix decay_;  // sum_k rate_k O_k^+ O_k
  double spectral_bound_ = 0.0;

  bool blocked_ = false;
  std::vector<int> excitation_;    // per basis index
  std::vector<Index> order_;       // excitation-order position -> basis index
  std::vector<int> sector_of_;     // per position
  std::vector<Sector> sectors_;
  Index packed_size_ = 0;
  std::vector<SparseMatrix> sorted_jumps_;
  std::vector<Coupling> couplings_;
  SparseMatrix sorted_decay_;
};

CMatrix lindblad_rhs(const MasterEquation& eq, const DensityMatrix& rho);

/// A shared reservoir collectively coupling `domains` at `rate` times gamma.
struct Reservoir {
  std::vector<int> domains;
  double rate = 1.0;
};

/// Chain and star helpers: {0,1},{1,2},... and {leaf, center} per leaf.
std::vector<Reservoir> chain_reservoirs(int num_domains);
std::vector<Reservoir> star_reservoirs(int center, const std::vector<int>& leaves);

MasterEquation build_collective_zero_T(const BasisDescriptor& basis, const std::vector<Reservoir>& reservoirs);

/// Thermal collective reservoirs plus optional individual thermalisation and
/// dephasing of every physical spin. Terms with zero rate are omitted, so
/// nbar = 0 without individual effects reproduces build_collective_zero_T.
MasterEquation build_realistic(const BasisDescriptor& basis, const std::vector<Reservoir>& reservoirs,
                               double nbar, bool include_individual, double gamma_dep_over_gamma);

/// A named scalar evaluated on the full state at every sample.
struct Observable {
  std::string name;
  std::function<double(const DensityMatrix&)> evaluate;
};

struct EvolveOptions {
  IntegratorOptions integrator;
  std::vector<Observable> observables;
  /// Domains to keep in stored snapshots; none stored when empty.
  std::vector<int> keep;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> observables;
  std::vector<DensityMatrix> snapshots;
  std::optional<DensityMatrix> final_state;
  IntegratorStats stats;

  /// Throws InvalidArgument for an unknown name.
  const std::vector<double>& series(const std::string& name) const;
};

/// Integrates from tau = 0 to t_max, sampling every sample_dt (t_max is
/// always the last sample). rho is symmetrised at sample points only.
Trajectory evolve(const MasterEquation& eq, const DensityMatrix& rho0, double t_max, double sample_dt,
                  const EvolveOptions& options = {});

struct SteadyStateOptions {
  double tol = 1e-10;
  double max_time = 200.0;
  /// Caps the step at stability_factor / spectral_bound. Near stationarity
  /// the error controller otherwise parks the step on the edge of the
  /// explicit stability region, where fast modes stop decaying and the
  /// residual plateaus around the absolute tolerance.
  double stability_factor = 4.0;
  IntegratorOptions integrator;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;  // Frobenius norm of d rho / d tau
  double elapsed_scaled_time = 0.0;
};

/// Integrates until the residual drops below tol. No null-space shortcut:
/// the stationary manifold is degenerate, so the answer depends on rho0.
SteadyStateResult steady_state(const MasterEquation& eq, const DensityMatrix& rho0,
                               const SteadyStateOptions& options = {});

double expectation(const DensityMatrix& rho, const Operator& op);

/// First time the series reaches half its maximum, linearly interpolated.
double half_max_time(std::span<const double> series, std::span<const double> times);

}  // namespace qlre
