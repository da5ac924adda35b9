#pragma once

#include "wntorus/fit.hpp"
#include "wntorus/model.hpp"
#include "wntorus/optimize.hpp"

namespace wntorus {

struct OptimizerControl {
  enum class Method { simplex, quasi_newton_numeric };

  Method method = Method::simplex;
  int max_evals = 20000;
  double x_tol = 1e-8;
  double f_tol = 1e-10;
  /// Simplex edge length per coordinate, under one wrap period.
  double initial_step = 0.1;
  /// Largest dimension accepted; the lattice grows as (2J+1)^p.
  int max_dimension = 6;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// Negative truncated log-likelihood at from_log_cholesky(theta).
double direct_objective(const LogCholeskyParams& theta, const TorusSample& sample,
                        const LatticeConfig& config);

/// Direct maximization of the truncated log-likelihood over log-Cholesky coordinates.
/// Throws DimensionGuard when p exceeds ctrl.max_dimension.
FitResult fit_direct(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                     const OptimizerControl& ctrl = {});

}  // namespace wntorus
