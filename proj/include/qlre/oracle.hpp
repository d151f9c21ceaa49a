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

#include "qlre/hilbert.hpp"

namespace qlre {

// Closed-form states for the three-domain chain (1, N_B, 1) whose middle
// domain is coupled to both outer spins through two shared reservoirs. All
// vectors live in the Full backend; use to_collective for comparisons in the
// symmetric basis.

/// The state left untouched by both reservoirs:
///   sqrt(N_B/(2N_B+1)) (|u,d..d,d> + |d,d..d,u> - (1/N_B) sum_j |d,d..u_j..d,d>)
PureState dark_state(int n_b);

/// 1/sqrt(2+4N_B) (|u,d..d,d> + |d,d..d,u> + 2 sum_j |d,d..u_j..d,d>)
PureState psi_1(int n_b);

/// (|u,d..d,d> - |d,d..d,u>) / sqrt(2)
PureState psi_2(int n_b);

/// (|d,u,d,d> - |d,d,u,d>) / sqrt(2) for N_B = 2: a second stationary
/// state, orthogonal to the other three.
PureState psi_d2();

struct DarkStateFamily {
  int n_b = 0;
  PureState psi_d;
  PureState psi_1;
  PureState psi_2;
};

DarkStateFamily dark_state_family(int n_b);

/// Weight of the dark state in the steady state reached from
/// |u>|d..d>|d>: N_B / (2N_B + 1).
double x_dark(int n_b);

/// Weight of |Psi+> in the reduced outer-spin steady state:
/// 2 N_B^2 / (2N_B + 1)^2.
double x_reduced(int n_b);

/// Concurrence of the outer-spin steady state; equal to x_reduced.
double concurrence_analytic(int n_b);

/// (1 - x_d) |d..d><d..d| + x_d |psi_d><psi_d| in the Full backend.
DensityMatrix chain_dark_steady(int n_b);

/// x |Psi+><Psi+| + (1 - x) |dd><dd| on two single-spin domains.
DensityMatrix psi_plus_ground_mixture(double x);

/// 1/2 (|dd><dd| + |Psi-><Psi-|): the steady state of two spins sharing one
/// zero-temperature reservoir, started from |ud>.
DensityMatrix intro_pair_steady();

// Reference states on single-spin domains (index 0 is up).
PureState bell_psi_minus();
PureState bell_psi_plus();
PureState ghz_state();
PureState w_state();

struct TripartiteDecomposition {
  double c_ground = 0.0;
  double c_w = 0.0;
  double residual = 0.0;  // Frobenius norm of rho - c_G P_G - c_W P_W
};

/// Projects a three-qubit state onto |ddd><ddd| and |W><W|.
TripartiteDecomposition tripartite_decompose(const CMatrix& rho);
TripartiteDecomposition tripartite_decompose(const DensityMatrix& rho);

}  // namespace qlre
