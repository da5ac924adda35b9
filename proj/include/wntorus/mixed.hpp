#pragma once

#include <Eigen/Core>

#include "wntorus/cem.hpp"
#include "wntorus/em.hpp"

namespace wntorus {

/// Paired observations: p1 angles and p2 real values per row.
class MixedSample {
 public:
  MixedSample(TorusSample torus, Eigen::MatrixXd linear);

  const TorusSample& torus() const noexcept { return torus_; }
  const Eigen::MatrixXd& linear() const noexcept { return linear_; }
  Eigen::Index n() const noexcept { return torus_.n(); }

 private:
  TorusSample torus_;
  Eigen::MatrixXd linear_;
};

struct MixedParams {
  Eigen::VectorXd mu1;  ///< torus block, canonical angles
  Eigen::VectorXd mu2;
  Eigen::MatrixXd sigma11;
  Eigen::MatrixXd sigma12;
  Eigen::MatrixXd sigma22;

  /// The (p1+p2) x (p1+p2) joint covariance.
  Eigen::MatrixXd joint_covariance() const;
};

struct MixedFit {
  MixedParams params;
  FitResult torus_fit;
  /// The assembled joint covariance was not positive definite and had its eigenvalues
  /// floored; only the cross block is changed.
  bool repaired = false;
};

/// CEM on the torus block, then the normal MLE of (x1_hat_i, x2_i) supplies mu2,
/// sigma12 and sigma22. mu1 and sigma11 come from the CEM fit.
MixedFit fit_mixed_cem(const MixedSample& sample, const LatticeConfig& config,
                       const IterControl& ctrl = {});

/// EM on the torus block; conditional means stand in for the unwrapped torus values
/// when estimating sigma12. mu2 and sigma22 use the linear block only.
MixedFit fit_mixed_em(const MixedSample& sample, const LatticeConfig& config,
                      const IterControl& ctrl = {});

}  // namespace wntorus
