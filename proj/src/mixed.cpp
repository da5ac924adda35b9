#include "wntorus/mixed.hpp"

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/linalg.hpp"

namespace wntorus {

MixedSample::MixedSample(TorusSample torus, Eigen::MatrixXd linear)
    : torus_(std::move(torus)), linear_(std::move(linear)) {
  if (linear_.rows() != torus_.n()) {
    throw DimensionMismatch("torus and linear blocks have different numbers of rows");
  }
  if (linear_.cols() < 1) throw InvalidArgument("linear block needs at least one column");
  if (!linear_.allFinite()) throw InvalidArgument("linear block has non-finite values");
}

Eigen::MatrixXd MixedParams::joint_covariance() const {
  const Eigen::Index p1 = sigma11.rows();
  const Eigen::Index p2 = sigma22.rows();
  Eigen::MatrixXd s(p1 + p2, p1 + p2);
  s.topLeftCorner(p1, p1) = sigma11;
  s.topRightCorner(p1, p2) = sigma12;
  s.bottomLeftCorner(p2, p1) = sigma12.transpose();
  s.bottomRightCorner(p2, p2) = sigma22;
  return s;
}

namespace {

// Floors the eigenvalues of the joint matrix and copies back the cross block only.
bool repair_cross_block(MixedParams& params) {
  Eigen::MatrixXd joint = params.joint_covariance();
  if (linalg::is_positive_definite(joint)) return false;
  linalg::clip_eigenvalues(joint, 1e-6);
  params.sigma12 = joint.topRightCorner(params.sigma11.rows(), params.sigma22.rows());
  if (!linalg::is_positive_definite(params.joint_covariance())) {
    params.sigma11 = joint.topLeftCorner(params.sigma11.rows(), params.sigma11.rows());
    params.sigma22 = joint.bottomRightCorner(params.sigma22.rows(), params.sigma22.rows());
  }
  return true;
}

}  // namespace

MixedFit fit_mixed_cem(const MixedSample& sample, const LatticeConfig& config,
                       const IterControl& ctrl) {
  const WnParams init = initial_params(sample.torus());
  const CemFitResult cem = fit_cem(sample.torus(), init, config, ctrl);

  MixedFit out;
  out.params.mu1 = cem.params.mu;
  out.params.sigma11 = cem.params.sigma;
  out.params.mu2 = linalg::column_mean(sample.linear());
  out.params.sigma12 = linalg::population_cross_covariance(cem.unwrapped, sample.linear());
  out.params.sigma22 = linalg::population_covariance(sample.linear());
  out.repaired = repair_cross_block(out.params);
  out.torus_fit = cem;
  return out;
}

MixedFit fit_mixed_em(const MixedSample& sample, const LatticeConfig& config,
                      const IterControl& ctrl) {
  const WnParams init = initial_params(sample.torus());
  const FitResult em = fit_em(sample.torus(), init, config, ctrl);
  const Eigen::MatrixXd x1 = conditional_means(sample.torus(), em.params, config, ctrl.exec);

  MixedFit out;
  out.params.mu1 = em.params.mu;
  out.params.sigma11 = em.params.sigma;
  out.params.mu2 = linalg::column_mean(sample.linear());
  out.params.sigma12 = linalg::population_cross_covariance(x1, sample.linear());
  out.params.sigma22 = linalg::population_covariance(sample.linear());
  out.repaired = repair_cross_block(out.params);
  out.torus_fit = em;
  return out;
}

}  // namespace wntorus
