#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "wntorus/params.hpp"
#include "wntorus/sample.hpp"

namespace wntorus {

using Rng = std::mt19937_64;

/// n draws of N_p(mu, sigma) wrapped componentwise into [0, 2pi).
TorusSample sample_wn(const WnParams& params, Eigen::Index n, Rng& rng);
TorusSample sample_wn(const WnParams& params, Eigen::Index n, std::uint64_t seed);

struct CorrelationSpec {
  Eigen::Index p = 2;
  double cn = 20.0;          ///< target condition number, > 1
  double tol = 1e-3;         ///< relative tolerance on the achieved condition number
  int max_rounds = 100;
};

struct CorrelationResult {
  Eigen::MatrixXd matrix;
  double condition_number = 0.0;
  int rounds = 0;
};

/// Random correlation matrix with a fixed condition number.
///
/// Eigenvalues 1 < u_(2) < ... < u_(p-1) < cn (sorted uniforms) are rotated by the
/// eigenvectors of Y^T Y for a standard normal Y and the result scaled to unit
/// diagonal. Normalization disturbs the spectrum, so the largest eigenvalue is reset to
/// cn times the smallest and the matrix renormalized until the condition number is
/// within tol. Throws ConvergenceFailure after max_rounds.
CorrelationResult random_correlation(const CorrelationSpec& spec, Rng& rng);
CorrelationResult random_correlation(const CorrelationSpec& spec, std::uint64_t seed);

/// sigma0^2 * R
Eigen::MatrixXd scale_to_covariance(const Eigen::MatrixXd& correlation, double sigma0);

/// -2 (loglik(truth) - loglik(estimate)) on the given sample.
double wilks_lambda(const TorusSample& sample, const WnParams& estimate, const WnParams& truth,
                    const LatticeConfig& config);

/// trace(S_hat S0^-1) - log det(S_hat S0^-1) - p, via Cholesky solves.
double scatter_divergence(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& sigma_true);

struct MetricsReport {
  double wilks = 0.0;
  double angle_sep = 0.0;
  double scatter_div = 0.0;
  double runtime_seconds = 0.0;
};

MetricsReport evaluate_metrics(const TorusSample& sample, const WnParams& estimate,
                               const WnParams& truth, const LatticeConfig& config);

}  // namespace wntorus
