#pragma once

#include "sclab/common.hpp"

namespace sclab {

struct OdeOptions {
  /// Local error per unit time, relative to 1 + |y|.
  double tol = 1e-10;
  double initial_step = 0.0;  // 0 = auto
  double min_step = 1e-14;
  long max_steps = 2'000'000;
};

/// Called after every accepted step (and once at the initial point).
/// Return false to stop the integration early.
using OdeObserver = std::function<bool(double t, const VectorXd& y)>;

/// Adaptive embedded Dormand-Prince 5(4). Integrates dy/dt = f(t, y) from
/// t0 to t1 (either direction). Throws IntegrationFailure on step-size
/// underflow, carrying the last valid time.
VectorXd integrate_rk45(const std::function<void(double, const VectorXd&, VectorXd&)>& f,
                        double t0, double t1, VectorXd y0,
                        const OdeOptions& opts = {},
                        const OdeObserver& observer = nullptr);

}  // namespace sclab
