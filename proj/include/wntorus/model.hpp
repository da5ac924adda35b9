#pragma once

#include <Eigen/Core>

#include "wntorus/params.hpp"
#include "wntorus/sample.hpp"

namespace wntorus {

/// Log density of N_p(params.mu, params.sigma) at x via a Cholesky factor.
double mvn_logpdf(const Eigen::Ref<const Eigen::VectorXd>& x, const WnParams& params);

/// Lattice rows in deterministic lexicographic order.
Lattice lattice_rows(const LatticeConfig& config, Eigen::Index p);

/// log of the truncated wrapped density at y: log-sum-exp over lattice shifts of the
/// representative of y centered on params.mu.
double wrapped_log_density(const Eigen::Ref<const Eigen::VectorXd>& y, const WnParams& params,
                           const LatticeConfig& config);

/// Sum of wrapped_log_density over the sample, reduced in observation order.
double log_likelihood(const TorusSample& sample, const WnParams& params,
                      const LatticeConfig& config);

/// Unconstrained parameter vector: mu (p entries) then the upper triangle of R,
/// row by row, where sigma = R^T R and the diagonal of R is stored as its log.
struct LogCholeskyParams {
  Eigen::VectorXd theta;

  static Eigen::Index size_for(Eigen::Index p) { return p + p * (p + 1) / 2; }
};

/// Throws SingularCovariance if sigma is not positive definite.
LogCholeskyParams to_log_cholesky(const WnParams& params);
/// Accepts any finite theta; the returned covariance is always positive definite
/// (up to floating underflow of exp on the diagonal).
WnParams from_log_cholesky(const LogCholeskyParams& theta, Eigen::Index p);

}  // namespace wntorus
