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

#include "qlre/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <cmath>
#include <string>

#include "qlre/errors.hpp"

namespace qlre {

MasterEquation::MasterEquation(BasisDescriptor basis, std::vector<LindbladTerm> terms)
    : basis_(std::move(basis)), terms_(std::move(terms)), decay_(basis_.dim(), basis_.dim()) {
  jumps_.reserve(terms_.size());
  adjoints_.reserve(terms_.size());
  for (const auto& term : terms_) {
    if (!(term.jump.basis() == basis_)) throw InvalidArgument("Lindblad term basis does not match the equation");
    if (!(term.rate >= 0.0) || !std::isfinite(term.rate)) throw InvalidArgument("Lindblad rates must be >= 0");
    jumps_.push_back(term.jump.matrix());
    adjoints_.push_back(SparseMatrix(term.jump.matrix().adjoint()));
    decay_ += SparseMatrix(term.rate * (adjoints_.back() * jumps_.back()));
  }
  decay_.prune(Complex(0.0), 0.0);
  decay_.makeCompressed();

  // ||L|| <= 2 ||K|| + 2 sum_k r_k ||O_k||^2, with ||A||_2^2 <= ||A||_1 ||A||_inf.
  auto max_row_sum = [](const SparseMatrix& a) {
    double best = 0.0;
    for (Index r = 0; r < a.outerSize(); ++r) {
      double sum = 0.0;
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) sum += std::abs(it.value());
      best = std::max(best, sum);
    }
    return best;
  };
  spectral_bound_ = 2.0 * max_row_sum(decay_);
  for (std::size_t k = 0; k < terms_.size(); ++k)
    spectral_bound_ += 2.0 * terms_[k].rate * max_row_sum(jumps_[k]) * max_row_sum(adjoints_[k]);
  build_blocks();
}

void MasterEquation::build_blocks() {
  const Index n = basis_.dim();
  // Up-spin count of every basis index, from the per-domain digits.
  excitation_.assign(static_cast<std::size_t>(n), 0);
  const auto& dims = basis_.domain_dims();
  const auto& pops = basis_.populations();
  for (Index i = 0; i < n; ++i) {
    Index rest = i;
    int count = 0;
    for (std::size_t m = dims.size(); m-- > 0;) {
      const Index digit = rest % dims[m];
      rest /= dims[m];
      if (basis_.backend() == Backend::Collective)
        count += pops[m] - static_cast<int>(digit);
      else
        count += pops[m] - std::popcount(static_cast<std::uint64_t>(digit));
    }
    excitation_[static_cast<std::size_t>(i)] = count;
  }
  auto exc = [this](Index i) { return excitation_[static_cast<std::size_t>(i)]; };

  std::vector<int> deltas;
  for (const auto& jump : jumps_) {
    std::optional<int> delta;
    for (Index r = 0; r < jump.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(jump, r); it; ++it) {
        const int d = exc(r) - exc(it.col());
        if (delta && *delta != d) return;
        delta = d;
      }
    }
    deltas.push_back(delta.value_or(0));
  }

  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Index{0});
  std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return exc(a) < exc(b); });
  std::vector<Index> position(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) position[static_cast<std::size_t>(order_[static_cast<std::size_t>(p)])] = p;

  sectors_.clear();
  sector_of_.resize(static_cast<std::size_t>(n));
  packed_size_ = 0;
  for (Index p = 0; p < n; ++p) {
    const int e = exc(order_[static_cast<std::size_t>(p)]);
    if (sectors_.empty() || sectors_.back().excitation != e) sectors_.push_back({e, p, 0, 0});
    ++sectors_.back().size;
    sector_of_[static_cast<std::size_t>(p)] = static_cast<int>(sectors_.size()) - 1;
  }
  for (auto& sector : sectors_) {
    sector.offset = packed_size_;
    packed_size_ += sector.size * sector.size;
  }

  auto permute = [&](const SparseMatrix& a) {
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(a.nonZeros()));
    for (Index r = 0; r < a.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(a, r); it; ++it)
        entries.emplace_back(position[static_cast<std::size_t>(r)], position[static_cast<std::size_t>(it.col())],
                             it.value());
    SparseMatrix out(a.rows(), a.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
  };
  sorted_jumps_.clear();
  couplings_.clear();
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    sorted_jumps_.push_back(permute(jumps_[k]));
    Coupling coupling;
    for (const auto& target : sectors_) {
      int source = -1;
      for (std::size_t u = 0; u < sectors_.size(); ++u)
        if (sectors_[u].excitation == target.excitation - deltas[k]) source = static_cast<int>(u);
      coupling.source.push_back(source);
      coupling.offset.push_back(coupling.scratch);
      if (source >= 0) coupling.scratch += target.size * sectors_[static_cast<std::size_t>(source)].size;
    }
    couplings_.push_back(std::move(coupling));
  }
  sorted_decay_ = permute(decay_);
  blocked_ = true;
}

bool MasterEquation::is_block_diagonal(const CMatrix& rho) const {
  if (!blocked_ || rho.rows() != basis_.dim() || rho.cols() != basis_.dim()) return false;
  for (Index c = 0; c < rho.cols(); ++c)
    for (Index r = 0; r < rho.rows(); ++r)
      if (excitation_[static_cast<std::size_t>(r)] != excitation_[static_cast<std::size_t>(c)] &&
          rho(r, c) != Complex(0.0))
        return false;
  return true;
}

CMatrix MasterEquation::pack(const CMatrix& rho) const {
  CMatrix out(packed_size_, 1);
  for (const auto& sector : sectors_) {
    Eigen::Map<CMatrix> block(out.data() + sector.offset, sector.size, sector.size);
    for (Index c = 0; c < sector.size; ++c)
      for (Index r = 0; r < sector.size; ++r)
        block(r, c) = rho(order_[static_cast<std::size_t>(sector.begin + r)],
                          order_[static_cast<std::size_t>(sector.begin + c)]);
  }
  return out;
}

CMatrix MasterEquation::unpack(const CMatrix& packed) const {
  CMatrix out = CMatrix::Zero(basis_.dim(), basis_.dim());
  for (const auto& sector : sectors_) {
    Eigen::Map<const CMatrix> block(packed.data() + sector.offset, sector.size, sector.size);
    for (Index c = 0; c < sector.size; ++c)
      for (Index r = 0; r < sector.size; ++r)
        out(order_[static_cast<std::size_t>(sector.begin + r)], order_[static_cast<std::size_t>(sector.begin + c)]) =
            block(r, c);
  }
  return out;
}

Complex MasterEquation::packed_trace(const CMatrix& packed) const {
  Complex sum(0.0);
  for (const auto& sector : sectors_)
    sum += Eigen::Map<const CMatrix>(packed.data() + sector.offset, sector.size, sector.size).trace();
  return sum;
}

double MasterEquation::packed_asymmetry(const CMatrix& packed) const {
  double worst = 0.0;
  for (const auto& sector : sectors_) {
    Eigen::Map<const CMatrix> block(packed.data() + sector.offset, sector.size, sector.size);
    worst = std::max(worst, (block - block.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

void MasterEquation::symmetrize_packed(CMatrix& packed) const {
  for (const auto& sector : sectors_) {
    Eigen::Map<CMatrix> block(packed.data() + sector.offset, sector.size, sector.size);
    block = (0.5 * (block + block.adjoint())).eval();
  }
}

namespace {

// out += scale * x * a^+ for row-major sparse a. Column r of the product is a
// combination of columns of x, so every update is a contiguous axpy.
void add_times_adjoint(const CMatrix& x, const SparseMatrix& a, double scale, CMatrix& out) {
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) out.col(r) += (scale * std::conj(it.value())) * x.col(it.col());
}

}  // namespace

void MasterEquation::apply(const CMatrix& rho, CMatrix& out) const {
  // With rho and K Hermitian the generator is H + H^+ where
  // H = sum_k r_k O_k rho O_k^+ - rho K. Each dissipator uses
  // O rho O^+ = (rho O^+)^+ O^+ so only right products with adjoints appear.
  // The result is exactly Hermitian so Runge-Kutta combinations of Hermitian
  // stages stay exactly Hermitian as well.
  thread_local CMatrix right;
  thread_local CMatrix right_adjoint;
  const Index n = rho.rows();
  right.resize(n, n);
  right_adjoint.resize(n, n);
  out.setZero(n, n);
  add_times_adjoint(rho, decay_, -1.0, out);
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].rate == 0.0) continue;
    right.setZero();
    add_times_adjoint(rho, jumps_[k], 1.0, right);
    right_adjoint = right.adjoint();
    add_times_adjoint(right_adjoint, jumps_[k], terms_[k].rate, out);
  }
  out += out.adjoint().eval();
}

void MasterEquation::apply_packed(const CMatrix& packed, CMatrix& out) const {
  // Same algebra as apply(), on the diagonal blocks only. A jump with a fixed
  // excitation change maps the source sector u of each target sector t onto
  // t, so rho O^+ lives in the (u, t) block and O rho O^+ in the (t, t) one.
  thread_local CVector right;
  thread_local CVector right_adjoint;
  out.setZero(packed_size_, 1);
  const Complex* rho = packed.data();
  Complex* result = out.data();
  auto sector_at = [this](Index p) -> const Sector& {
    return sectors_[static_cast<std::size_t>(sector_of_[static_cast<std::size_t>(p)])];
  };

  for (Index r = 0; r < sorted_decay_.outerSize(); ++r) {
    const Sector& s = sector_at(r);
    Eigen::Map<CVector> target(result + s.offset + (r - s.begin) * s.size, s.size);
    for (SparseMatrix::InnerIterator it(sorted_decay_, r); it; ++it)
      target -= std::conj(it.value()) * Eigen::Map<const CVector>(rho + s.offset + (it.col() - s.begin) * s.size, s.size);
  }

  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].rate == 0.0) continue;
    const SparseMatrix& jump = sorted_jumps_[k];
    const Coupling& coupling = couplings_[k];
    right.setZero(coupling.scratch);
    right_adjoint.resize(coupling.scratch);
    for (Index r = 0; r < jump.outerSize(); ++r) {
      const int t = sector_of_[static_cast<std::size_t>(r)];
      const Sector& st = sectors_[static_cast<std::size_t>(t)];
      if (coupling.source[static_cast<std::size_t>(t)] < 0) continue;
      const Sector& su = sectors_[static_cast<std::size_t>(coupling.source[static_cast<std::size_t>(t)])];
      Eigen::Map<CVector> target(right.data() + coupling.offset[static_cast<std::size_t>(t)] + (r - st.begin) * su.size,
                                 su.size);
      for (SparseMatrix::InnerIterator it(jump, r); it; ++it)
        target += std::conj(it.value()) *
                  Eigen::Map<const CVector>(rho + su.offset + (it.col() - su.begin) * su.size, su.size);
    }
    for (std::size_t t = 0; t < sectors_.size(); ++t) {
      if (coupling.source[t] < 0) continue;
      const Sector& st = sectors_[t];
      const Sector& su = sectors_[static_cast<std::size_t>(coupling.source[t])];
      Eigen::Map<const CMatrix> block(right.data() + coupling.offset[t], su.size, st.size);
      Eigen::Map<CMatrix>(right_adjoint.data() + coupling.offset[t], st.size, su.size) = block.adjoint();
    }
    for (Index r = 0; r < jump.outerSize(); ++r) {
      const int t = sector_of_[static_cast<std::size_t>(r)];
      const Sector& st = sectors_[static_cast<std::size_t>(t)];
      if (coupling.source[static_cast<std::size_t>(t)] < 0) continue;
      const Sector& su = sectors_[static_cast<std::size_t>(coupling.source[static_cast<std::size_t>(t)])];
      Eigen::Map<CVector> target(result + st.offset + (r - st.begin) * st.size, st.size);
      const Complex* base = right_adjoint.data() + coupling.offset[static_cast<std::size_t>(t)];
      for (SparseMatrix::InnerIterator it(jump, r); it; ++it)
        target += (terms_[k].rate * std::conj(it.value())) *
                  Eigen::Map<const CVector>(base + (it.col() - su.begin) * st.size, st.size);
    }
  }
  for (const auto& sector : sectors_) {
    Eigen::Map<CMatrix> block(result + sector.offset, sector.size, sector.size);
    block += block.adjoint().eval();
  }
}

CMatrix lindblad_rhs(const MasterEquation& eq, const DensityMatrix& rho) {
  if (!(rho.basis() == eq.basis())) throw InvalidArgument("density matrix basis does not match the equation");
  CMatrix out(rho.dim(), rho.dim());
  eq.apply(rho.matrix(), out);
  return out;
}

std::vector<Reservoir> chain_reservoirs(int num_domains) {
  if (num_domains < 2) throw InvalidArgument("a chain needs at least two domains");
  std::vector<Reservoir> out;
  for (int m = 0; m + 1 < num_domains; ++m) out.push_back({{m, m + 1}, 1.0});
  return out;
}

std::vector<Reservoir> star_reservoirs(int center, const std::vector<int>& leaves) {
  if (leaves.empty()) throw InvalidArgument("a star needs at least one leaf");
  std::vector<Reservoir> out;
  for (int leaf : leaves) out.push_back({{leaf, center}, 1.0});
  return out;
}

MasterEquation build_collective_zero_T(const BasisDescriptor& basis, const std::vector<Reservoir>& reservoirs) {
  return build_realistic(basis, reservoirs, 0.0, false, 0.0);
}

MasterEquation build_realistic(const BasisDescriptor& basis, const std::vector<Reservoir>& reservoirs,
                               double nbar, bool include_individual, double gamma_dep_over_gamma) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw InvalidArgument("nbar must be a finite value >= 0");
  if (!(gamma_dep_over_gamma >= 0.0) || !std::isfinite(gamma_dep_over_gamma))
    throw InvalidArgument("dephasing ratio must be a finite value >= 0");
  if ((include_individual || gamma_dep_over_gamma > 0.0) && basis.backend() != Backend::Full)
    throw UnsupportedConfiguration("individual thermalisation and dephasing require the full backend");

  std::vector<LindbladTerm> terms;
  for (const auto& reservoir : reservoirs) {
    if (!(reservoir.rate >= 0.0)) throw InvalidArgument("reservoir rate must be >= 0");
    Operator lowering = reservoir_jump(basis, reservoir.domains);
    Operator raising = lowering.adjoint();
    terms.push_back({std::move(lowering), reservoir.rate * (nbar + 1.0)});
    if (nbar > 0.0) terms.push_back({std::move(raising), reservoir.rate * nbar});
  }
  if (include_individual || gamma_dep_over_gamma > 0.0) {
    for (int m = 0; m < static_cast<int>(basis.num_domains()); ++m) {
      for (int s = 0; s < basis.populations()[m]; ++s) {
        if (include_individual) {
          terms.push_back({single_spin_operator(basis, m, s, PauliKind::Lowering), nbar + 1.0});
          if (nbar > 0.0) terms.push_back({single_spin_operator(basis, m, s, PauliKind::Raising), nbar});
        }
        if (gamma_dep_over_gamma > 0.0)
          terms.push_back({single_spin_operator(basis, m, s, PauliKind::Z), gamma_dep_over_gamma});
      }
    }
  }
  return MasterEquation(basis, std::move(terms));
}

// ---------------------------------------------------------------------------

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (const auto& [key, values] : observables)
    if (key == name) return values;
  throw InvalidArgument("trajectory has no observable named '" + name + "'");
}

namespace {

std::vector<double> sample_times(double t_max, double sample_dt) {
  std::vector<double> times;
  const auto n = static_cast<long>(std::floor(t_max / sample_dt + 1e-9));
  for (long k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * sample_dt);
  if (t_max - times.back() > 1e-9 * std::max(1.0, t_max)) times.push_back(t_max);
  return times;
}

// Block-diagonal states are integrated in packed form.
struct Representation {
  const MasterEquation& eq;
  bool packed;

  AdaptiveIntegrator::Rhs rhs() const {
    if (packed) return [&eq = eq](const CMatrix& y, CMatrix& dy) { eq.apply_packed(y, dy); };
    return [&eq = eq](const CMatrix& y, CMatrix& dy) { eq.apply(y, dy); };
  }
  StateChecks checks() const {
    if (!packed) return {};
    return {[&eq = eq](const CMatrix& y) { return eq.packed_trace(y); },
            [&eq = eq](const CMatrix& y) { return eq.packed_asymmetry(y); }};
  }
  CMatrix encode(const CMatrix& rho) const { return packed ? eq.pack(rho) : rho; }
  CMatrix decode(const CMatrix& y) const { return packed ? eq.unpack(y) : y; }
  Complex trace(const CMatrix& y) const { return packed ? eq.packed_trace(y) : y.trace(); }
  void symmetrize(CMatrix& y) const {
    if (packed)
      eq.symmetrize_packed(y);
    else
      y = (0.5 * (y + y.adjoint())).eval();
  }
};

}  // namespace

Trajectory evolve(const MasterEquation& eq, const DensityMatrix& rho0, double t_max, double sample_dt,
                  const EvolveOptions& options) {
  if (!(rho0.basis() == eq.basis())) throw InvalidArgument("initial state basis does not match the equation");
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample_dt must be > 0");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be finite and >= 0");

  Trajectory traj;
  for (const auto& obs : options.observables) traj.observables.emplace_back(obs.name, std::vector<double>{});

  const Representation rep{eq, eq.is_block_diagonal(rho0.matrix())};
  AdaptiveIntegrator integrator(rep.rhs(), options.integrator, rep.checks());
  CMatrix rho = rep.encode(rho0.matrix());
  const Complex initial_trace = rep.trace(rho);
  double t = 0.0;

  auto record = [&](double time) {
    const DensityMatrix state = DensityMatrix::unchecked(rep.decode(rho), eq.basis());
    traj.times.push_back(time);
    for (std::size_t i = 0; i < options.observables.size(); ++i)
      traj.observables[i].second.push_back(options.observables[i].evaluate(state));
    if (!options.keep.empty()) traj.snapshots.push_back(partial_trace(state, options.keep));
  };

  for (double target : sample_times(t_max, sample_dt)) {
    if (target > t) {
      integrator.advance(t, rho, target);
      rep.symmetrize(rho);
      integrator.invalidate();
    }
    const double drift = std::abs(rep.trace(rho) - initial_trace);
    if (drift > options.integrator.trace_tol)
      throw IntegrationFailure("trace drift " + std::to_string(drift) + " exceeds tolerance", drift);
    record(target);
  }
  traj.final_state = DensityMatrix::unchecked(rep.decode(rho), eq.basis());
  traj.stats = integrator.stats();
  return traj;
}

SteadyStateResult steady_state(const MasterEquation& eq, const DensityMatrix& rho0,
                               const SteadyStateOptions& options) {
  if (!(rho0.basis() == eq.basis())) throw InvalidArgument("initial state basis does not match the equation");
  if (!(options.tol > 0.0)) throw InvalidArgument("steady-state tolerance must be > 0");

  const Representation rep{eq, eq.is_block_diagonal(rho0.matrix())};
  const AdaptiveIntegrator::Rhs rhs = rep.rhs();
  CMatrix rho = rep.encode(rho0.matrix());
  CMatrix derivative(rho.rows(), rho.cols());
  rhs(rho, derivative);
  double residual = derivative.norm();
  if (residual < options.tol) return {rho0, residual, 0.0};

  IntegratorOptions integrator_options = options.integrator;
  if (options.stability_factor > 0.0 && eq.spectral_bound() > 0.0)
    integrator_options.max_step = std::min(integrator_options.max_step, options.stability_factor / eq.spectral_bound());
  AdaptiveIntegrator integrator(rhs, integrator_options, rep.checks());
  double t = 0.0;
  const bool converged = integrator.advance(t, rho, options.max_time, [&](double, const CMatrix&, const CMatrix& dy) {
    residual = dy.norm();
    return residual < options.tol;
  });
  rep.symmetrize(rho);
  rhs(rho, derivative);
  residual = derivative.norm();
  if (!converged || residual >= options.tol) {
    throw ConvergenceFailure("no steady state within scaled time " + std::to_string(options.max_time) +
                                 " (residual " + std::to_string(residual) + ")",
                             residual);
  }
  return {DensityMatrix::unchecked(rep.decode(rho), eq.basis()), residual, t};
}

double expectation(const DensityMatrix& rho, const Operator& op) {
  if (!(rho.basis() == op.basis())) throw InvalidArgument("operator basis does not match the state");
  const Complex value = (op.matrix() * rho.matrix()).trace();
  return value.real();
}

double half_max_time(std::span<const double> series, std::span<const double> times) {
  if (series.empty()) throw InvalidArgument("empty series");
  if (series.size() != times.size()) throw InvalidArgument("series and times differ in length");
  const double peak = *std::max_element(series.begin(), series.end());
  if (!(peak > 0.0)) throw UndefinedResult("half-maximum time undefined for a series without positive values");
  const double half = 0.5 * peak;
  if (series[0] >= half) return times[0];
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] >= half) {
      const double frac = (half - series[i - 1]) / (series[i] - series[i - 1]);
      return times[i - 1] + frac * (times[i] - times[i - 1]);
    }
  }
  return times.back();
}

}  // namespace qlre
