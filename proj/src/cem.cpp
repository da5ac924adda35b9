#include "wntorus/cem.hpp"

#include <cmath>
#include <string>

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/kernels.hpp"
#include "wntorus/linalg.hpp"
#include "wntorus/model.hpp"

namespace wntorus {

Eigen::VectorXi classify(const Eigen::Ref<const Eigen::VectorXd>& weights,
                         const LatticeConfig& config, Eigen::Index p) {
  const Lattice lattice(config, p);
  if (weights.size() != lattice.size()) {
    throw DimensionMismatch("classify: weight vector does not match the lattice");
  }
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < weights.size(); ++r) {
    if (weights[r] > weights[best]) best = r;
  }
  return lattice.row(best).transpose();
}

Eigen::MatrixXd unwrap(const TorusSample& sample, const Eigen::MatrixXi& offsets) {
  if (offsets.rows() != sample.n() || offsets.cols() != sample.p()) {
    throw DimensionMismatch("wrapping coefficients do not match the sample");
  }
  return sample.angles() + kTwoPi * offsets.cast<double>();
}

MStepResult cem_m_step(const TorusSample& sample, const Eigen::MatrixXi& offsets) {
  if (sample.n() < 2) throw DegenerateEstimate("CEM M step needs at least two observations");
  const Eigen::MatrixXd x = unwrap(sample, offsets);
  MStepResult out;
  out.params.mu = linalg::column_mean(x);
  Eigen::MatrixXd sigma = linalg::population_covariance(x);
  for (Eigen::Index r = 0; r < sigma.rows(); ++r) {
    if (!(sigma(r, r) > 0.0)) {
      throw DegenerateEstimate("CEM M step: column " + std::to_string(r) +
                               " of the unwrapped data has zero variance");
    }
  }
  if (!linalg::is_positive_definite(sigma)) {
    sigma += 1e-10 * (sigma.trace() / static_cast<double>(sigma.rows())) *
             Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    if (!linalg::is_positive_definite(sigma)) {
      throw DegenerateEstimate("CEM M step: unwrapped data have a singular covariance");
    }
    out.ridged = true;
  }
  out.params.sigma = std::move(sigma);
  return out;
}

double classification_log_likelihood(const TorusSample& sample, const Eigen::MatrixXi& offsets,
                                     const WnParams& params) {
  const Eigen::MatrixXd x = unwrap(sample, offsets);
  const auto l = linalg::cholesky_lower(params.sigma);
  if (!l) throw SingularCovariance("covariance is not positive definite");
  const double p = static_cast<double>(params.p());
  const double log_norm = -0.5 * p * std::log(kTwoPi) - l->diagonal().array().log().sum();
  const Eigen::MatrixXd centered = (x.rowwise() - params.mu.transpose()).transpose();
  const Eigen::MatrixXd z = l->triangularView<Eigen::Lower>().solve(centered);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) total += log_norm - 0.5 * z.col(i).squaredNorm();
  return total;
}

CemFitResult fit_cem(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                     const IterControl& ctrl) {
  if (sample.p() != init.p()) throw DimensionMismatch("fit_cem: sample and init dimensions differ");
  if (ctrl.max_iter < 0 || !(ctrl.tol > 0.0)) throw InvalidArgument("fit_cem: invalid control");
  const Lattice lattice(config, sample.p());
  const Eigen::Index n = sample.n();
  const Eigen::Index p = sample.p();

  CemFitResult result;
  WnParams current = init;
  Eigen::MatrixXi previous;
  Eigen::MatrixXi offsets(n, p);
  Eigen::MatrixXi coefficients(n, p);

  for (int iter = 1;; ++iter) {
    const kernels::PosteriorSummary post =
        kernels::posterior_summary(sample, current, lattice, kernels::Moments::none, ctrl.exec);
    for (Eigen::Index i = 0; i < n; ++i) {
      coefficients.row(i) = lattice.row(post.map_row[static_cast<std::size_t>(i)]);
      offsets.row(i) = post.center_offsets.row(i) + coefficients.row(i);
    }
    if (iter > 1 && offsets == previous) {
      // current was fitted to exactly this classification.
      result.coefficients = coefficients;
      result.classified_at = current;
      result.converged = true;
      result.reason = StopReason::fixed_point;
      break;
    }
    if (iter > ctrl.max_iter) {
      result.reason = StopReason::max_iter;
      if (result.iterations == 0) {
        previous = offsets;
        result.coefficients = coefficients;
        result.classified_at = current;
      }
      break;
    }
    MStepResult next = cem_m_step(sample, offsets);
    ++result.iterations;
    const double lc = classification_log_likelihood(sample, offsets, next.params);
    if (!std::isfinite(lc)) {
      throw NumericalFailure("fit_cem: non-finite classification log-likelihood at iteration " +
                             std::to_string(iter));
    }
    result.loglik_trace.push_back(lc);
    const double change = parameter_change(current, next.params);
    result.classified_at = current;
    current = std::move(next.params);
    previous = offsets;
    result.coefficients = coefficients;

    if (next.ridged) {
      result.reason = StopReason::degenerate;
      break;
    }
    const auto& t = result.loglik_trace;
    const bool done = ctrl.rule == StopRule::loglik_change
                          ? t.size() >= 2 && std::abs(t[t.size() - 1] - t[t.size() - 2]) < ctrl.tol
                          : change < ctrl.tol;
    if (done) {
      result.converged = true;
      result.reason = StopReason::tol_reached;
      break;
    }
  }

  result.offsets = previous;
  result.unwrapped = unwrap(sample, result.offsets);
  result.params = current.canonical();
  result.loglik = log_likelihood(sample, result.params, config);
  return result;
}

}  // namespace wntorus
