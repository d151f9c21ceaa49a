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
#include <limits>

#include "qlre/types.hpp"

namespace qlre {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-12;
  long max_steps = 50'000'000;
  /// Steps whose trace moves further than this from the starting trace are
  /// rejected and retried with a smaller step.
  double trace_tol = 1e-8;
  /// Max-abs deviation from Hermiticity tolerated on an accepted step.
  double hermitian_tol = 1e-10;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  double worst_trace_drift = 0.0;
};

/// Dormand-Prince 5(4) embedded Runge-Kutta on a complex matrix state, with
/// FSAL reuse and an elementwise max-norm error control. Each accepted step
/// is additionally screened for trace and Hermiticity drift.
/// Trace and Hermiticity defect of a state. The defaults treat y as a dense
/// square matrix; packed representations supply their own.
struct StateChecks {
  std::function<Complex(const CMatrix&)> trace;
  std::function<double(const CMatrix&)> asymmetry;
};

class AdaptiveIntegrator {
 public:
  using Rhs = std::function<void(const CMatrix& y, CMatrix& dydt)>;
  /// Called after each accepted step with the new time, state and its
  /// derivative. Returning true stops the integration early.
  using StepObserver = std::function<bool(double t, const CMatrix& y, const CMatrix& dydt)>;

  AdaptiveIntegrator(Rhs rhs, IntegratorOptions options, StateChecks checks = {});

  /// Advances (t, y) to t_end exactly. Returns true if the observer stopped
  /// the run early. Throws IntegrationFailure when the step size collapses.
  bool advance(double& t, CMatrix& y, double t_end, const StepObserver& observer = {});

  /// Drops the cached derivative; call after modifying y between advances.
  void invalidate() noexcept { have_derivative_ = false; }

  const IntegratorStats& stats() const noexcept { return stats_; }
  double step_size() const noexcept { return h_; }

 private:
  Rhs rhs_;
  IntegratorOptions options_;
  StateChecks checks_;
  IntegratorStats stats_;
  double h_;
  bool have_derivative_ = false;
  bool have_reference_trace_ = false;
  Complex reference_trace_;
  CMatrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, stage_, y_new_;
};

}  // namespace qlre
