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

#include "qlre/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlre/errors.hpp"

namespace qlre {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

}  // namespace

AdaptiveIntegrator::AdaptiveIntegrator(Rhs rhs, IntegratorOptions options, StateChecks checks)
    : rhs_(std::move(rhs)), options_(options), checks_(std::move(checks)), h_(options.initial_step) {
  if (!checks_.trace) checks_.trace = [](const CMatrix& y) { return y.trace(); };
  if (!checks_.asymmetry)
    checks_.asymmetry = [](const CMatrix& y) { return (y - y.adjoint()).cwiseAbs().maxCoeff(); };
  if (!(options_.rtol > 0.0) || !(options_.atol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(h_ > 0.0)) throw InvalidArgument("initial step must be positive");
}

bool AdaptiveIntegrator::advance(double& t, CMatrix& y, double t_end, const StepObserver& observer) {
  if (t_end < t) throw InvalidArgument("cannot integrate backwards");
  if (!have_reference_trace_) {
    reference_trace_ = checks_.trace(y);
    have_reference_trace_ = true;
  }
  if (!have_derivative_) {
    k1_.resize(y.rows(), y.cols());
    rhs_(y, k1_);
    ++stats_.rhs_evaluations;
    have_derivative_ = true;
  }

  while (t < t_end) {
    if (stats_.accepted + stats_.rejected >= options_.max_steps)
      throw IntegrationFailure("step budget exhausted at t = " + std::to_string(t), stats_.worst_trace_drift);

    const double remaining = t_end - t;
    double h = std::min({h_, options_.max_step, remaining});
    const bool clipped = h < h_;
    // Absorb a sliver left over by floating-point round-off into this step.
    if (remaining - h < 1e-12 * std::max(1.0, std::abs(t_end))) h = remaining;

    stage_ = y + h * a21 * k1_;
    rhs_(stage_, k2_);
    stage_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(stage_, k3_);
    stage_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(stage_, k4_);
    stage_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(stage_, k5_);
    stage_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(stage_, k6_);
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(y_new_, k7_);
    stats_.rhs_evaluations += 6;

    stage_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double err = 0.0;
    for (Index j = 0; j < y.cols(); ++j) {
      for (Index i = 0; i < y.rows(); ++i) {
        const double scale = options_.atol + options_.rtol * std::max(std::abs(y(i, j)), std::abs(y_new_(i, j)));
        err = std::max(err, std::abs(stage_(i, j)) / scale);
      }
    }

    bool accept = std::isfinite(err) && err <= 1.0;
    double drift = 0.0;
    if (accept) {
      drift = std::abs(checks_.trace(y_new_) - reference_trace_);
      const double asym = checks_.asymmetry(y_new_);
      if (drift > options_.trace_tol || asym > options_.hermitian_tol) accept = false;
      stats_.worst_trace_drift = std::max(stats_.worst_trace_drift, drift);
    }

    double factor = kMaxFactor;
    if (err > 0.0 && std::isfinite(err)) factor = std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
    if (!std::isfinite(err)) factor = kMinFactor;

    if (accept) {
      t = (h == remaining) ? t_end : t + h;
      y.swap(y_new_);
      k1_.swap(k7_);
      ++stats_.accepted;
      const double proposed = h * factor;
      h_ = clipped ? std::max(h_, proposed) : proposed;
      if (observer && observer(t, y, k1_)) return true;
    } else {
      ++stats_.rejected;
      h_ = h * std::min(factor, 0.5);
      if (h_ < options_.min_step) {
        throw IntegrationFailure("step size underflow at t = " + std::to_string(t) +
                                     " (worst trace drift " + std::to_string(stats_.worst_trace_drift) + ")",
                                 stats_.worst_trace_drift);
      }
    }
  }
  return false;
}

}  // namespace qlre
