#pragma once

#include <span>

#include <Eigen/Core>

#include "wntorus/fit.hpp"
#include "wntorus/params.hpp"
#include "wntorus/sample.hpp"

namespace wntorus {

/// Posterior probabilities of the lattice rows for one observation, aligned with
/// Lattice order, plus the recentered representative they refer to.
struct EStepWeights {
  Eigen::VectorXd weights;
  Eigen::VectorXd centered;
};

/// Posterior mean and covariance of the unwrapped point.
struct ConditionalMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct MStepResult {
  WnParams params;
  bool ridged = false;
};

EStepWeights e_step(const Eigen::Ref<const Eigen::VectorXd>& y, const WnParams& params,
                    const LatticeConfig& config);

/// Weighted moments of the points y_tilde + 2*pi*J_r. `y_tilde` is used as given.
ConditionalMoments conditional_moments(const Eigen::Ref<const Eigen::VectorXd>& y_tilde,
                                       const Eigen::Ref<const Eigen::VectorXd>& weights,
                                       const LatticeConfig& config);

/// Average conditional mean, and average within covariance plus the between covariance
/// (divisor n) of the conditional means. A numerically singular result gets a ridge of
/// 1e-10 * max(trace/p, ridge_scale) on the diagonal and is flagged.
MStepResult m_step(std::span<const ConditionalMoments> moments, double ridge_scale = 0.0);

/// Variance-decomposition EM from `init`.
FitResult fit_em(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                 const IterControl& ctrl = {});

/// Conditional means of every observation at `params`, in the frame centered on params.mu.
Eigen::MatrixXd conditional_means(const TorusSample& sample, const WnParams& params,
                                  const LatticeConfig& config,
                                  kernels::Exec exec = kernels::Exec::parallel);

}  // namespace wntorus
