#pragma once

#include <string_view>
#include <vector>

#include "wntorus/kernels.hpp"
#include "wntorus/params.hpp"

namespace wntorus {

enum class StopReason {
  tol_reached,
  max_iter,
  degenerate,
  fixed_point,  ///< classification unchanged between iterations (CEM)
};

std::string_view to_string(StopReason reason);

enum class StopRule {
  loglik_change,    ///< |change in log-likelihood| < tol
  parameter_change, ///< max |change| over mu and sigma entries < tol
};

/// Iteration control shared by EM and CEM.
struct IterControl {
  int max_iter = 500;
  double tol = 1e-8;
  StopRule rule = StopRule::loglik_change;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct FitResult {
  WnParams params;                  ///< mu canonical in [0, 2pi)
  std::vector<double> loglik_trace; ///< objective after each completed step
  double loglik = 0.0;              ///< truncated wrapped log-likelihood at params
  int iterations = 0;
  int evaluations = 0;              ///< objective evaluations (direct maximization)
  bool converged = false;
  StopReason reason = StopReason::max_iter;
};

/// Largest absolute change over mean components (circular) and covariance entries.
double parameter_change(const WnParams& a, const WnParams& b);

}  // namespace wntorus
