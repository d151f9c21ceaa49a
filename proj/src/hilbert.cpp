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

#include "qlre/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qlre/errors.hpp"

namespace qlre {

namespace {

constexpr int kMaxFullSpins = 30;

std::vector<Index> strides_of(const std::vector<Index>& dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t m = dims.size(); m-- > 1;) strides[m - 1] = strides[m] * dims[m];
  return strides;
}

SparseMatrix sparse_identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Index ra = 0; ra < a.outerSize(); ++ra) {
    for (SparseMatrix::InnerIterator ia(a, ra); ia; ++ia) {
      for (Index rb = 0; rb < b.outerSize(); ++rb) {
        for (SparseMatrix::InnerIterator ib(b, rb); ib; ++ib) {
          triplets.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                ia.value() * ib.value());
        }
      }
    }
  }
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

double binomial(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

int ups_in(Index full_index, int population) {
  return population - std::popcount(static_cast<std::uint64_t>(full_index));
}

std::vector<int> checked_keep(const std::vector<int>& keep, std::size_t n) {
  if (keep.empty()) throw InvalidArgument("domain index set must be nonempty");
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("duplicate domain index");
  if (sorted.front() < 0 || sorted.back() >= static_cast<int>(n))
    throw InvalidArgument("domain index out of range");
  return sorted;
}

void require_single_domain(const BasisDescriptor& basis) {
  if (basis.num_domains() != 1) throw InvalidArgument("expected a single-domain operator");
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Collective:
      return "collective";
    case Backend::Full:
      return "full";
  }
  throw InvalidArgument("unknown backend");
}

Backend backend_from_string(std::string_view name) {
  if (name == "collective") return Backend::Collective;
  if (name == "full") return Backend::Full;
  throw InvalidArgument("unknown backend '" + std::string(name) + "'");
}

Index domain_dimension(Backend backend, int population) {
  if (population < 1) throw InvalidArgument("domain population must be >= 1");
  switch (backend) {
    case Backend::Collective:
      return population + 1;
    case Backend::Full:
      if (population > kMaxFullSpins) throw InvalidArgument("too many spins for the full backend");
      return Index{1} << population;
  }
  throw InvalidArgument("unknown backend");
}

// ---------------------------------------------------------------------------

BasisDescriptor::BasisDescriptor(Backend backend, std::vector<int> populations)
    : backend_(backend), populations_(std::move(populations)) {
  if (populations_.empty()) throw InvalidArgument("basis needs at least one domain");
  dims_.reserve(populations_.size());
  for (int n : populations_) {
    dims_.push_back(domain_dimension(backend_, n));
    total_ *= dims_.back();
  }
}

int BasisDescriptor::total_spins() const noexcept {
  return std::accumulate(populations_.begin(), populations_.end(), 0);
}

BasisDescriptor BasisDescriptor::subsystem(const std::vector<int>& keep) const {
  std::vector<int> pops;
  for (int m : checked_keep(keep, num_domains())) pops.push_back(populations_[m]);
  return BasisDescriptor(backend_, std::move(pops));
}

BasisDescriptor BasisDescriptor::with_backend(Backend backend) const {
  return BasisDescriptor(backend, populations_);
}

Operator::Operator(SparseMatrix matrix, BasisDescriptor basis)
    : matrix_(std::move(matrix)), basis_(std::move(basis)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != basis_.dim())
    throw InvalidArgument("operator dimension does not match its basis");
  matrix_.makeCompressed();
}

Operator Operator::adjoint() const { return Operator(SparseMatrix(matrix_.adjoint()), basis_); }

PureState::PureState(CVector amplitudes, BasisDescriptor basis)
    : amplitudes_(std::move(amplitudes)), basis_(std::move(basis)) {
  if (amplitudes_.size() != basis_.dim())
    throw InvalidArgument("state dimension does not match its basis");
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTol) throw InvalidArgument("state is not normalized");
}

PureState PureState::normalized(CVector amplitudes, BasisDescriptor basis) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw InvalidArgument("cannot normalize the zero vector");
  return PureState(amplitudes / norm, std::move(basis));
}

void validate_density_matrix(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidArgument("density matrix must be square");
  const double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol)
    throw InvalidArgument("density matrix not Hermitian (max deviation " + std::to_string(asym) + ")");
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw InvalidArgument("density matrix trace " + std::to_string(tr.real()) + " differs from 1");
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < kEigenvalueFloor)
    throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(lowest));
}

DensityMatrix::DensityMatrix(CMatrix matrix, BasisDescriptor basis)
    : matrix_(std::move(matrix)), basis_(std::move(basis)) {
  if (matrix_.rows() != basis_.dim()) throw InvalidArgument("density matrix dimension does not match its basis");
  validate_density_matrix(matrix_);
}

DensityMatrix::DensityMatrix(CMatrix matrix, BasisDescriptor basis, NoCheck)
    : matrix_(std::move(matrix)), basis_(std::move(basis)) {
  if (matrix_.rows() != basis_.dim() || matrix_.cols() != basis_.dim())
    throw InvalidArgument("density matrix dimension does not match its basis");
}

DensityMatrix DensityMatrix::unchecked(CMatrix matrix, BasisDescriptor basis) {
  return DensityMatrix(std::move(matrix), std::move(basis), NoCheck{});
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  CMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(std::move(rho), psi.basis(), NoCheck{});
}

// ---------------------------------------------------------------------------

Operator collective_lowering(int population, Backend backend) {
  const BasisDescriptor basis(backend, {population});
  const Index dim = basis.dim();
  std::vector<Eigen::Triplet<Complex>> triplets;
  if (backend == Backend::Collective) {
    const double j = 0.5 * population;
    for (Index i = 0; i < population; ++i) {
      const double m = j - static_cast<double>(i);
      triplets.emplace_back(i + 1, i, std::sqrt(j * (j + 1.0) - m * (m - 1.0)));
    }
  } else {
    for (Index x = 0; x < dim; ++x) {
      for (int s = 0; s < population; ++s) {
        const Index bit = Index{1} << (population - 1 - s);
        if ((x & bit) == 0) triplets.emplace_back(x | bit, x, 1.0);
      }
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m), basis);
}

Operator collective_raising(int population, Backend backend) {
  return collective_lowering(population, backend).adjoint();
}

Operator collective_jz(int population, Backend backend) {
  const BasisDescriptor basis(backend, {population});
  const Index dim = basis.dim();
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Index i = 0; i < dim; ++i) {
    const double value = backend == Backend::Collective
                             ? 0.5 * population - static_cast<double>(i)
                             : ups_in(i, population) - 0.5 * population;
    if (value != 0.0) m.insert(i, i) = value;
  }
  return Operator(std::move(m), basis);
}

Operator single_spin_operator(const BasisDescriptor& basis, int domain, int spin, PauliKind kind) {
  if (basis.backend() != Backend::Full)
    throw UnsupportedConfiguration("single-spin operators require the full backend");
  if (domain < 0 || domain >= static_cast<int>(basis.num_domains()))
    throw InvalidArgument("domain index out of range");
  if (spin < 0 || spin >= basis.populations()[domain]) throw InvalidArgument("spin index out of range");
  int position = spin;
  for (int m = 0; m < domain; ++m) position += basis.populations()[m];
  const Index bit = Index{1} << (basis.total_spins() - 1 - position);
  const Index dim = basis.dim();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  for (Index x = 0; x < dim; ++x) {
    const bool up = (x & bit) == 0;
    switch (kind) {
      case PauliKind::Lowering:
        if (up) triplets.emplace_back(x | bit, x, 1.0);
        break;
      case PauliKind::Raising:
        if (!up) triplets.emplace_back(x & ~bit, x, 1.0);
        break;
      case PauliKind::Z:
        triplets.emplace_back(x, x, up ? 1.0 : -1.0);
        break;
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m), basis);
}

Operator embed(const SparseMatrix& op, const BasisDescriptor& basis, int domain) {
  if (domain < 0 || domain >= static_cast<int>(basis.num_domains()))
    throw InvalidArgument("domain index out of range");
  const auto& dims = basis.domain_dims();
  if (op.rows() != dims[domain] || op.cols() != dims[domain])
    throw InvalidArgument("operator dimension does not match domain " + std::to_string(domain));
  Index left = 1;
  Index right = 1;
  for (int m = 0; m < domain; ++m) left *= dims[m];
  for (std::size_t m = domain + 1; m < dims.size(); ++m) right *= dims[m];
  return Operator(sparse_kron(sparse_kron(sparse_identity(left), op), sparse_identity(right)), basis);
}

Operator embed(const Operator& op, const BasisDescriptor& basis, int domain) {
  require_single_domain(op.basis());
  if (op.basis().backend() != basis.backend()) throw InvalidArgument("backend mismatch in embed");
  return embed(op.matrix(), basis, domain);
}

Operator reservoir_jump(const BasisDescriptor& basis, const std::vector<int>& domains) {
  const auto sorted = checked_keep(domains, basis.num_domains());
  SparseMatrix sum(basis.dim(), basis.dim());
  for (int m : sorted) {
    sum += embed(collective_lowering(basis.populations()[m], basis.backend()), basis, m).matrix();
  }
  return Operator(std::move(sum), basis);
}

// ---------------------------------------------------------------------------

CVector local_vector(Backend backend, int population, const LocalPure& level) {
  const Index dim = domain_dimension(backend, population);
  CVector v = CVector::Zero(dim);
  if (const auto* dicke = std::get_if<DickeLevel>(&level)) {
    const int k = dicke->excitations;
    if (k < 0 || k > population)
      throw InvalidArgument("Dicke level with " + std::to_string(k) + " excitations outside [0, " +
                            std::to_string(population) + "]");
    if (backend == Backend::Collective) {
      v(population - k) = 1.0;
    } else {
      const double amp = 1.0 / std::sqrt(binomial(population, k));
      for (Index x = 0; x < dim; ++x)
        if (ups_in(x, population) == k) v(x) = amp;
    }
    return v;
  }
  const auto& bits = std::get<Bitstring>(level);
  if (backend != Backend::Full) throw InvalidArgument("bitstring levels require the full backend");
  if (static_cast<int>(bits.up.size()) != population)
    throw InvalidArgument("bitstring length does not match the domain population");
  Index x = 0;
  for (bool up : bits.up) x = (x << 1) | (up ? 0 : 1);
  v(x) = 1.0;
  return v;
}

PureState product_pure_state(const BasisDescriptor& basis, const std::vector<LocalPure>& levels) {
  if (levels.size() != basis.num_domains()) throw InvalidArgument("need one level per domain");
  CVector psi = CVector::Ones(1);
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const CVector local = local_vector(basis.backend(), basis.populations()[m], levels[m]);
    CVector next(psi.size() * local.size());
    for (Index i = 0; i < psi.size(); ++i) next.segment(i * local.size(), local.size()) = psi(i) * local;
    psi = std::move(next);
  }
  return PureState::normalized(std::move(psi), basis);
}

DensityMatrix product_state(const BasisDescriptor& basis, const std::vector<LocalState>& levels) {
  if (levels.size() != basis.num_domains()) throw InvalidArgument("need one level per domain");
  CMatrix rho = CMatrix::Ones(1, 1);
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const Index d = basis.domain_dims()[m];
    CMatrix local;
    if (const auto* given = std::get_if<CMatrix>(&levels[m])) {
      if (given->rows() != d || given->cols() != d)
        throw InvalidArgument("local density matrix for domain " + std::to_string(m) + " has wrong dimension");
      validate_density_matrix(*given);
      local = *given;
    } else {
      const LocalPure pure = std::holds_alternative<DickeLevel>(levels[m])
                                 ? LocalPure(std::get<DickeLevel>(levels[m]))
                                 : LocalPure(std::get<Bitstring>(levels[m]));
      const CVector v = local_vector(basis.backend(), basis.populations()[m], pure);
      local = v * v.adjoint();
    }
    CMatrix next(rho.rows() * d, rho.cols() * d);
    for (Index i = 0; i < rho.rows(); ++i)
      for (Index j = 0; j < rho.cols(); ++j) next.block(i * d, j * d, d, d) = rho(i, j) * local;
    rho = std::move(next);
  }
  return DensityMatrix::unchecked(std::move(rho), basis);
}

// ---------------------------------------------------------------------------

CMatrix partial_trace(const CMatrix& rho, const BasisDescriptor& basis, const std::vector<int>& keep) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim())
    throw InvalidArgument("matrix dimension does not match basis");
  const auto kept = checked_keep(keep, basis.num_domains());
  const auto& dims = basis.domain_dims();
  const auto strides = strides_of(dims);

  std::vector<bool> is_kept(dims.size(), false);
  for (int m : kept) is_kept[m] = true;
  std::vector<Index> kept_dims;
  std::vector<Index> traced_dims;
  for (std::size_t m = 0; m < dims.size(); ++m) (is_kept[m] ? kept_dims : traced_dims).push_back(dims[m]);
  const Index dk = std::accumulate(kept_dims.begin(), kept_dims.end(), Index{1}, std::multiplies<>());
  const Index dt = std::accumulate(traced_dims.begin(), traced_dims.end(), Index{1}, std::multiplies<>());

  // full_index[t * dk + k] is the global index with kept digits k and traced digits t.
  std::vector<Index> full_index(static_cast<std::size_t>(dk * dt));
  const auto kept_strides = strides_of(kept_dims);
  const auto traced_strides = strides_of(traced_dims);
  for (Index g = 0; g < basis.dim(); ++g) {
    Index k = 0;
    Index t = 0;
    std::size_t ik = 0;
    std::size_t it = 0;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      const Index digit = (g / strides[m]) % dims[m];
      if (is_kept[m]) {
        k += digit * kept_strides[ik++];
      } else {
        t += digit * traced_strides[it++];
      }
    }
    full_index[static_cast<std::size_t>(t * dk + k)] = g;
  }

  CMatrix reduced = CMatrix::Zero(dk, dk);
  for (Index t = 0; t < dt; ++t) {
    const Index* row = &full_index[static_cast<std::size_t>(t * dk)];
    for (Index j = 0; j < dk; ++j)
      for (Index i = 0; i < dk; ++i) reduced(i, j) += rho(row[i], row[j]);
  }
  return reduced;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  return DensityMatrix::unchecked(partial_trace(rho.matrix(), rho.basis(), keep), rho.basis().subsystem(keep));
}

double fidelity_with_pure(const DensityMatrix& rho, const PureState& psi) {
  if (!(rho.basis() == psi.basis())) throw InvalidArgument("basis mismatch in fidelity");
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("shape mismatch in trace distance");
  const CMatrix diff = a - b;
  const CMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------

CMatrix symmetric_isometry(int population) {
  const Index full = domain_dimension(Backend::Full, population);
  CMatrix v = CMatrix::Zero(full, population + 1);
  for (int i = 0; i <= population; ++i)
    v.col(i) = local_vector(Backend::Full, population, DickeLevel{population - i});
  return v;
}

SparseMatrix collective_to_full_map(const BasisDescriptor& collective) {
  if (collective.backend() != Backend::Collective) throw InvalidArgument("expected a collective basis");
  SparseMatrix map = sparse_identity(1);
  for (int n : collective.populations()) map = sparse_kron(map, symmetric_isometry(n).sparseView());
  return map;
}

DensityMatrix to_full(const DensityMatrix& rho) {
  if (rho.basis().backend() == Backend::Full) return rho;
  const SparseMatrix v = collective_to_full_map(rho.basis());
  CMatrix half = v * rho.matrix();
  CMatrix full = half * v.adjoint();
  return DensityMatrix::unchecked(std::move(full), rho.basis().with_backend(Backend::Full));
}

PureState to_full(const PureState& psi) {
  if (psi.basis().backend() == Backend::Full) return psi;
  const SparseMatrix v = collective_to_full_map(psi.basis());
  return PureState::normalized(v * psi.amplitudes(), psi.basis().with_backend(Backend::Full));
}

PureState to_collective(const PureState& psi) {
  if (psi.basis().backend() == Backend::Collective) return psi;
  const BasisDescriptor collective = psi.basis().with_backend(Backend::Collective);
  const SparseMatrix v = collective_to_full_map(collective);
  const CVector projected = v.adjoint() * psi.amplitudes();
  if (1.0 - projected.squaredNorm() > 1e-10)
    throw InvalidArgument("state has weight outside the symmetric subspace");
  return PureState::normalized(projected, collective);
}

Operator to_collective(const Operator& op) {
  if (op.basis().backend() == Backend::Collective) return op;
  const BasisDescriptor collective = op.basis().with_backend(Backend::Collective);
  const SparseMatrix v = collective_to_full_map(collective);
  SparseMatrix reduced = v.adjoint() * op.matrix() * v;
  return Operator(reduced.pruned(1e-14), collective);
}

}  // namespace qlre
