#pragma once

#include <Eigen/Core>

#include "wntorus/em.hpp"
#include "wntorus/fit.hpp"

namespace wntorus {

struct CemFitResult : FitResult {
  /// Chosen lattice row per observation, relative to its representative centered on the
  /// final E-step mean; entries lie in [-J, J]. n x p.
  Eigen::MatrixXi coefficients;
  /// Total wrapping counts: unwrapped = angles + 2*pi*offsets, exactly as computed. n x p.
  Eigen::MatrixXi offsets;
  /// Reconstructed unwrapped sample. n x p.
  Eigen::MatrixXd unwrapped;
  /// Parameters of the E step that produced `coefficients`. Equal to params (up to full
  /// turns of the mean) when the fit stopped at a fixed point.
  WnParams classified_at;
};

/// First lattice row of maximal weight (lexicographically smallest among ties).
Eigen::VectorXi classify(const Eigen::Ref<const Eigen::VectorXd>& weights,
                         const LatticeConfig& config, Eigen::Index p);

/// y_i + 2*pi*offsets_i for every observation.
Eigen::MatrixXd unwrap(const TorusSample& sample, const Eigen::MatrixXi& offsets);

/// Normal MLE (mean, covariance with divisor n) of the unwrapped points
/// y_i + 2*pi*offsets_i. Throws DegenerateEstimate for n < 2 or a constant column.
/// Singular but nonconstant data get a ridge and are flagged.
MStepResult cem_m_step(const TorusSample& sample, const Eigen::MatrixXi& offsets);

/// Sum of log N(y_i + 2*pi*offsets_i; params).
double classification_log_likelihood(const TorusSample& sample, const Eigen::MatrixXi& offsets,
                                     const WnParams& params);

/// Classification EM: E, C (hard assignment of wrapping coefficients) and M steps until
/// the classification is unchanged, the classification log-likelihood changes by less
/// than tol, or max_iter is reached. loglik_trace holds the classification
/// log-likelihood after each M step.
CemFitResult fit_cem(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                     const IterControl& ctrl = {});

}  // namespace wntorus
