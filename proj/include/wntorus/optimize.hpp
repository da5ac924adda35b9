#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace wntorus::optimize {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  int max_evals = 20000;
  double x_tol = 1e-8;         ///< simplex diameter / step length
  double f_tol = 1e-10;        ///< relative spread of objective values
  double initial_step = 0.1;   ///< simplex edge length per coordinate
};

struct Result {
  Eigen::VectorXd x;
  double f = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< best objective after each iteration
};

/// Nelder-Mead downhill simplex with reflection 1, expansion 2, contraction 1/2 and
/// shrink 1/2. Restarts from the best vertex after convergence until a restart no
/// longer improves the objective.
Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Options& opts);

/// BFGS with central finite-difference gradients (step cbrt(eps) * max(1, |x_i|)) and
/// a backtracking Armijo line search.
Result bfgs_numeric(const Objective& f, const Eigen::VectorXd& x0, const Options& opts);

}  // namespace wntorus::optimize
