#include "wntorus/direct.hpp"

#include <cmath>
#include <string>

#include "wntorus/error.hpp"
#include "wntorus/kernels.hpp"

namespace wntorus {

namespace {

// Negative log-likelihood straight from theta, without forming sigma.
class Objective {
 public:
  Objective(const TorusSample& sample, const Lattice& lattice, kernels::Exec exec)
      : sample_(sample), lattice_(lattice), exec_(exec) {}

  double operator()(const Eigen::VectorXd& theta) const {
    const Eigen::Index p = sample_.p();
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd log_diag(p);
    Eigen::Index k = p;
    for (Eigen::Index i = 0; i < p; ++i) {
      log_diag[i] = theta[k];
      lower(i, i) = std::exp(theta[k++]);
      for (Eigen::Index j = i + 1; j < p; ++j) lower(j, i) = theta[k++];
    }
    const kernels::LatticeGaussian gauss(std::move(lower), log_diag, lattice_);
    const kernels::PosteriorSummary post = kernels::posterior_summary(
        sample_, theta.head(p), gauss, kernels::Moments::none, exec_);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < post.log_density.size(); ++i) ll += post.log_density[i];
    return -ll;
  }

 private:
  const TorusSample& sample_;
  const Lattice& lattice_;
  kernels::Exec exec_;
};

}  // namespace

double direct_objective(const LogCholeskyParams& theta, const TorusSample& sample,
                        const LatticeConfig& config) {
  const Eigen::Index p = sample.p();
  if (theta.theta.size() != LogCholeskyParams::size_for(p)) {
    throw DimensionMismatch("direct_objective: theta length does not match the sample");
  }
  if (!theta.theta.allFinite()) throw InvalidArgument("direct_objective: theta must be finite");
  const Lattice lattice(config, p);
  return Objective(sample, lattice, kernels::Exec::parallel)(theta.theta);
}

FitResult fit_direct(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                     const OptimizerControl& ctrl) {
  const Eigen::Index p = sample.p();
  if (p != init.p()) throw DimensionMismatch("fit_direct: sample and init dimensions differ");
  if (p > ctrl.max_dimension) {
    throw DimensionGuard("direct maximization refuses p = " + std::to_string(p) +
                         " (limit " + std::to_string(ctrl.max_dimension) +
                         "); use em or cem, or raise the dimension limit");
  }
  if (ctrl.max_evals < 1 || !(ctrl.x_tol > 0.0) || !(ctrl.f_tol > 0.0)) {
    throw InvalidArgument("fit_direct: invalid optimizer control");
  }
  const Lattice lattice(config, p);
  const Objective objective(sample, lattice, ctrl.exec);
  const optimize::Objective f = [&](const Eigen::VectorXd& theta) { return objective(theta); };

  const optimize::Options opts{ctrl.max_evals, ctrl.x_tol, ctrl.f_tol, ctrl.initial_step};
  const Eigen::VectorXd theta0 = to_log_cholesky(init).theta;
  const optimize::Result res = ctrl.method == OptimizerControl::Method::simplex
                                   ? optimize::nelder_mead(f, theta0, opts)
                                   : optimize::bfgs_numeric(f, theta0, opts);

  FitResult result;
  result.params = from_log_cholesky(LogCholeskyParams{res.x}, p).canonical();
  result.loglik = -res.f;
  result.loglik_trace.reserve(res.trace.size());
  for (double v : res.trace) result.loglik_trace.push_back(-v);
  result.iterations = res.iterations;
  result.evaluations = res.evaluations;
  result.converged = res.converged;
  result.reason = res.converged ? StopReason::tol_reached : StopReason::max_iter;
  return result;
}

}  // namespace wntorus
