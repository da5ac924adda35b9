#include "wntorus/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/linalg.hpp"
#include "wntorus/model.hpp"

namespace wntorus {

TorusSample sample_wn(const WnParams& params, Eigen::Index n, Rng& rng) {
  if (n < 1) throw InvalidArgument("sample_wn: n must be at least 1");
  const auto l = linalg::cholesky_lower(params.sigma);
  if (!l) throw SingularCovariance("sample_wn: covariance is not positive definite");
  const Eigen::Index p = params.p();
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index r = 0; r < p; ++r) z[r] = normal(rng);
    x.row(i) = (params.mu + *l * z).transpose();
  }
  return TorusSample(std::move(x));
}

TorusSample sample_wn(const WnParams& params, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_wn(params, n, rng);
}

namespace {

// Scales a covariance to unit diagonal, forcing the diagonal to exactly 1.
Eigen::MatrixXd to_correlation(const Eigen::MatrixXd& s) {
  const Eigen::VectorXd inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r = linalg::symmetrize(r);
  r.diagonal().setOnes();
  return r;
}

}  // namespace

CorrelationResult random_correlation(const CorrelationSpec& spec, Rng& rng) {
  const Eigen::Index p = spec.p;
  if (p < 2) throw InvalidArgument("random_correlation: p must be at least 2");
  if (!(spec.cn > 1.0)) throw InvalidArgument("random_correlation: condition number must exceed 1");
  if (!(spec.tol > 0.0) || spec.max_rounds < 1) {
    throw InvalidArgument("random_correlation: invalid tolerance or round limit");
  }

  // Spectrum with extremes 1 and cn, interior sorted uniform on (1, cn).
  std::uniform_real_distribution<double> uniform(1.0, spec.cn);
  Eigen::VectorXd lambda(p);
  lambda[0] = 1.0;
  lambda[p - 1] = spec.cn;
  for (Eigen::Index k = 1; k < p - 1; ++k) lambda[k] = uniform(rng);
  std::sort(lambda.data() + 1, lambda.data() + p - 1);

  // Random orthogonal matrix from the eigenvectors of Y^T Y.
  std::normal_distribution<double> normal;
  Eigen::MatrixXd y(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) y(i, j) = normal(rng);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rot(y.transpose() * y);
  const Eigen::MatrixXd& u = rot.eigenvectors();

  Eigen::MatrixXd r = to_correlation(linalg::symmetrize(u * lambda.asDiagonal() * u.transpose()));
  CorrelationResult out;
  for (int round = 1; round <= spec.max_rounds; ++round) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
    Eigen::VectorXd values = eig.eigenvalues();
    values[p - 1] = spec.cn * values[0];
    const Eigen::MatrixXd& v = eig.eigenvectors();
    r = to_correlation(linalg::symmetrize(v * values.asDiagonal() * v.transpose()));
    out.rounds = round;
    out.condition_number = linalg::condition_number(r);
    if (std::abs(out.condition_number / spec.cn - 1.0) <= spec.tol) {
      out.matrix = std::move(r);
      return out;
    }
  }
  throw ConvergenceFailure("random_correlation: condition number " +
                           std::to_string(out.condition_number) + " after " +
                           std::to_string(spec.max_rounds) + " rounds (target " +
                           std::to_string(spec.cn) + ")");
}

CorrelationResult random_correlation(const CorrelationSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return random_correlation(spec, rng);
}

Eigen::MatrixXd scale_to_covariance(const Eigen::MatrixXd& correlation, double sigma0) {
  if (!(sigma0 > 0.0)) throw InvalidArgument("scale_to_covariance: sigma0 must be positive");
  return (sigma0 * sigma0) * correlation;
}

double wilks_lambda(const TorusSample& sample, const WnParams& estimate, const WnParams& truth,
                    const LatticeConfig& config) {
  return -2.0 * (log_likelihood(sample, truth, config) - log_likelihood(sample, estimate, config));
}

double scatter_divergence(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& sigma_true) {
  if (sigma_hat.rows() != sigma_true.rows() || sigma_hat.cols() != sigma_true.cols()) {
    throw DimensionMismatch("scatter_divergence: matrices differ in size");
  }
  const auto l0 = linalg::cholesky_lower(sigma_true);
  const auto lh = linalg::cholesky_lower(sigma_hat);
  if (!l0 || !lh) throw SingularCovariance("scatter_divergence: inputs must be positive definite");
  // trace(S_hat S0^-1) = |L0^-1 Lh|_F^2
  const Eigen::MatrixXd a = l0->triangularView<Eigen::Lower>().solve(*lh);
  const double log_det = 2.0 * (lh->diagonal().array().log().sum() - l0->diagonal().array().log().sum());
  return a.squaredNorm() - log_det - static_cast<double>(sigma_hat.rows());
}

MetricsReport evaluate_metrics(const TorusSample& sample, const WnParams& estimate,
                               const WnParams& truth, const LatticeConfig& config) {
  MetricsReport m;
  m.wilks = wilks_lambda(sample, estimate, truth, config);
  m.angle_sep = angle_separation(estimate.mu, truth.mu);
  m.scatter_div = scatter_divergence(estimate.sigma, truth.sigma);
  return m;
}

}  // namespace wntorus
