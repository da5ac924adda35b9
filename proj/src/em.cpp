#include "wntorus/em.hpp"

#include <cmath>
#include <string>

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/kernels.hpp"
#include "wntorus/linalg.hpp"

namespace wntorus {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tol_reached: return "tol-reached";
    case StopReason::max_iter: return "max-iter";
    case StopReason::degenerate: return "degenerate";
    case StopReason::fixed_point: return "fixed-point";
  }
  return "unknown";
}

EStepWeights e_step(const Eigen::Ref<const Eigen::VectorXd>& y, const WnParams& params,
                    const LatticeConfig& config) {
  if (y.size() != params.p()) throw DimensionMismatch("e_step: dimensions differ");
  const Lattice lattice(config, params.p());
  const kernels::LatticeGaussian gauss(params, lattice);
  EStepWeights out;
  out.centered = center_to(y, params.mu);
  Eigen::VectorXd terms(lattice.size());
  gauss.log_terms(out.centered - params.mu, terms);
  const double lse = kernels::log_sum_exp(terms);
  out.weights = (terms.array() - lse).exp().matrix();
  out.weights /= out.weights.sum();
  return out;
}

ConditionalMoments conditional_moments(const Eigen::Ref<const Eigen::VectorXd>& y_tilde,
                                       const Eigen::Ref<const Eigen::VectorXd>& weights,
                                       const LatticeConfig& config) {
  const Lattice lattice(config, y_tilde.size());
  if (weights.size() != lattice.size()) {
    throw DimensionMismatch("conditional_moments: weight vector does not match the lattice");
  }
  const Eigen::MatrixXd j = lattice.rows().cast<double>();
  const Eigen::VectorXd m = j.transpose() * weights;
  const Eigen::MatrixXd centered = j.rowwise() - m.transpose();
  ConditionalMoments out;
  out.mean = y_tilde + kTwoPi * m;
  out.cov = (kTwoPi * kTwoPi) * (centered.transpose() * weights.asDiagonal() * centered);
  out.cov = linalg::symmetrize(out.cov);
  return out;
}

MStepResult m_step(std::span<const ConditionalMoments> moments, double ridge_scale) {
  if (moments.empty()) throw InvalidArgument("m_step needs at least one observation");
  const Eigen::Index p = moments.front().mean.size();
  const auto n = static_cast<double>(moments.size());

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(p, p);
  for (const auto& m : moments) {
    if (m.mean.size() != p) throw DimensionMismatch("m_step: moments of mixed dimension");
    mu += m.mean;
    within += m.cov;
  }
  mu /= n;
  within /= n;
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(p, p);
  for (const auto& m : moments) {
    const Eigen::VectorXd c = m.mean - mu;
    between.noalias() += c * c.transpose();
  }
  between /= n;

  MStepResult out;
  Eigen::MatrixXd sigma = linalg::symmetrize(within + between);
  if (!sigma.allFinite()) throw NumericalFailure("m_step produced a non-finite covariance");
  if (!linalg::is_positive_definite(sigma)) {
    const double scale = std::max(sigma.trace() / static_cast<double>(p), ridge_scale);
    double ridge = 1e-10 * (scale > 0.0 ? scale : 1.0);
    Eigen::MatrixXd repaired = sigma;
    // A matrix with a negative eigenvalue from cancellation may need more than one ridge.
    for (int attempt = 0; attempt < 20; ++attempt, ridge *= 10.0) {
      repaired = sigma + ridge * Eigen::MatrixXd::Identity(p, p);
      if (linalg::is_positive_definite(repaired)) break;
    }
    if (!linalg::is_positive_definite(repaired)) {
      throw NumericalFailure("m_step covariance could not be repaired");
    }
    sigma = std::move(repaired);
    out.ridged = true;
  }
  out.params.mu = std::move(mu);
  out.params.sigma = std::move(sigma);
  return out;
}

double parameter_change(const WnParams& a, const WnParams& b) {
  double change = (a.sigma - b.sigma).cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < a.p(); ++r) {
    change = std::max(change, std::abs(centered_difference(a.mu[r], b.mu[r])));
  }
  return change;
}

namespace {

double total(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace

FitResult fit_em(const TorusSample& sample, const WnParams& init, const LatticeConfig& config,
                 const IterControl& ctrl) {
  if (sample.p() != init.p()) throw DimensionMismatch("fit_em: sample and init dimensions differ");
  if (ctrl.max_iter < 0 || !(ctrl.tol > 0.0)) throw InvalidArgument("fit_em: invalid control");
  const Lattice lattice(config, sample.p());
  const auto n = static_cast<std::size_t>(sample.n());

  FitResult result;
  WnParams current = init;
  std::vector<ConditionalMoments> moments(n);
  kernels::PosteriorSummary post;

  const auto evaluate = [&](int iter) {
    post = kernels::posterior_summary(sample, current, lattice, kernels::Moments::full, ctrl.exec);
    const double ll = total(post.log_density);
    if (!std::isfinite(ll)) {
      throw NumericalFailure("fit_em: non-finite log-likelihood at iteration " +
                             std::to_string(iter));
    }
    result.loglik_trace.push_back(ll);
    result.loglik = ll;
  };

  evaluate(0);
  for (int iter = 1;; ++iter) {
    if (iter > ctrl.max_iter) {
      result.reason = StopReason::max_iter;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      // Unwrapped running mean: conditional means stay in the frame of the current mu.
      moments[i].mean = current.mu + post.mean_deviation.row(static_cast<Eigen::Index>(i)).transpose();
      moments[i].cov = post.covariance[i];
    }
    MStepResult next = m_step(moments, current.sigma.trace() / static_cast<double>(current.p()));
    ++result.iterations;
    const double change = parameter_change(current, next.params);
    current = std::move(next.params);
    evaluate(iter);

    if (next.ridged) {
      result.reason = StopReason::degenerate;
      break;
    }
    const auto& t = result.loglik_trace;
    const bool done = ctrl.rule == StopRule::loglik_change
                          ? std::abs(t[t.size() - 1] - t[t.size() - 2]) < ctrl.tol
                          : change < ctrl.tol;
    if (done) {
      result.converged = true;
      result.reason = StopReason::tol_reached;
      break;
    }
  }
  result.params = current.canonical();
  return result;
}

Eigen::MatrixXd conditional_means(const TorusSample& sample, const WnParams& params,
                                  const LatticeConfig& config, kernels::Exec exec) {
  const Lattice lattice(config, params.p());
  const kernels::PosteriorSummary post =
      kernels::posterior_summary(sample, params, lattice, kernels::Moments::means, exec);
  return post.mean_deviation.rowwise() + params.mu.transpose();
}

}  // namespace wntorus
