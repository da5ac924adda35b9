#include "wntorus/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/kernels.hpp"
#include "wntorus/linalg.hpp"

namespace wntorus {

TorusSample::TorusSample(Eigen::MatrixXd angles) : angles_(std::move(angles)) {
  if (angles_.rows() < 1 || angles_.cols() < 1) {
    throw InvalidArgument("torus sample needs at least one row and one column");
  }
  for (Eigen::Index j = 0; j < angles_.cols(); ++j) {
    for (Eigen::Index i = 0; i < angles_.rows(); ++i) {
      const double v = angles_(i, j);
      if (!std::isfinite(v)) {
        throw InvalidArgument("non-finite angle at row " + std::to_string(i) + ", column " +
                              std::to_string(j));
      }
      if (v < 0.0 || v >= kTwoPi) {
        angles_(i, j) = wrap_angle(v).radians();
        ++wrapped_;
      }
    }
  }
}

WnParams::WnParams(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mu(std::move(mean)), sigma(std::move(covariance)) {
  const Eigen::Index p = mu.size();
  if (p < 1) throw InvalidArgument("parameter dimension must be at least 1");
  if (sigma.rows() != p || sigma.cols() != p) {
    throw DimensionMismatch("covariance is " + std::to_string(sigma.rows()) + "x" +
                            std::to_string(sigma.cols()) + " but the mean has dimension " +
                            std::to_string(p));
  }
  if (!mu.allFinite() || !sigma.allFinite()) throw InvalidArgument("non-finite parameters");
  const double asym = (sigma - sigma.transpose()).norm();
  if (asym > 1e-10 * std::max(sigma.norm(), std::numeric_limits<double>::min())) {
    throw InvalidArgument("covariance is not symmetric");
  }
  if (!linalg::is_positive_definite(sigma)) {
    throw SingularCovariance("covariance is not positive definite");
  }
}

WnParams WnParams::canonical() const {
  WnParams out = *this;
  for (Eigen::Index r = 0; r < out.mu.size(); ++r) out.mu[r] = wrap_angle(out.mu[r]).radians();
  return out;
}

std::int64_t LatticeConfig::row_count(Eigen::Index p) const {
  if (J < 0) throw InvalidArgument("lattice truncation J must be nonnegative");
  if (p < 1) throw InvalidArgument("lattice dimension must be at least 1");
  const std::int64_t side = 2 * static_cast<std::int64_t>(J) + 1;
  std::int64_t rows = 1;
  for (Eigen::Index r = 0; r < p; ++r) {
    if (rows > kMaxRows / side) {
      throw LatticeTooLarge("lattice with J = " + std::to_string(J) + " and p = " +
                            std::to_string(p) + " exceeds " + std::to_string(kMaxRows) +
                            " rows");
    }
    rows *= side;
  }
  return rows;
}

Lattice::Lattice(const LatticeConfig& config, Eigen::Index p) : J_(config.J) {
  const auto count = static_cast<Eigen::Index>(config.row_count(p));
  rows_.resize(count, p);
  Eigen::VectorXi current = Eigen::VectorXi::Constant(p, -J_);
  for (Eigen::Index r = 0; r < count; ++r) {
    rows_.row(r) = current.transpose();
    // odometer increment, last coordinate fastest
    for (Eigen::Index c = p - 1; c >= 0; --c) {
      if (current[c] < J_) {
        ++current[c];
        break;
      }
      current[c] = -J_;
    }
  }
}

double mvn_logpdf(const Eigen::Ref<const Eigen::VectorXd>& x, const WnParams& params) {
  if (x.size() != params.p()) throw DimensionMismatch("mvn_logpdf: point and mean dimensions differ");
  // The single-row lattice shares the factored evaluation used by the wrapped density.
  const Lattice origin(LatticeConfig{0}, params.p());
  const kernels::LatticeGaussian gauss(params, origin);
  Eigen::VectorXd term(1);
  gauss.log_terms(x - params.mu, term);
  return term[0];
}

Lattice lattice_rows(const LatticeConfig& config, Eigen::Index p) { return Lattice(config, p); }

double wrapped_log_density(const Eigen::Ref<const Eigen::VectorXd>& y, const WnParams& params,
                           const LatticeConfig& config) {
  if (y.size() != params.p()) {
    throw DimensionMismatch("wrapped_log_density: observation and mean dimensions differ");
  }
  const Lattice lattice(config, params.p());
  const kernels::LatticeGaussian gauss(params, lattice);
  Eigen::VectorXd d(y.size());
  for (Eigen::Index r = 0; r < y.size(); ++r) d[r] = centered_difference(y[r], params.mu[r]);
  Eigen::VectorXd terms(lattice.size());
  gauss.log_terms(d, terms);
  return kernels::log_sum_exp(terms);
}

double log_likelihood(const TorusSample& sample, const WnParams& params,
                      const LatticeConfig& config) {
  return kernels::log_likelihood(sample, params, Lattice(config, params.p()),
                                 kernels::Exec::parallel);
}

LogCholeskyParams to_log_cholesky(const WnParams& params) {
  const Eigen::Index p = params.p();
  const auto l = linalg::cholesky_lower(params.sigma);
  if (!l) throw SingularCovariance("to_log_cholesky: covariance is not positive definite");
  const Eigen::MatrixXd upper = l->transpose();
  LogCholeskyParams out;
  out.theta.resize(LogCholeskyParams::size_for(p));
  out.theta.head(p) = params.mu;
  Eigen::Index k = p;
  for (Eigen::Index i = 0; i < p; ++i) {
    out.theta[k++] = std::log(upper(i, i));
    for (Eigen::Index j = i + 1; j < p; ++j) out.theta[k++] = upper(i, j);
  }
  return out;
}

WnParams from_log_cholesky(const LogCholeskyParams& theta, Eigen::Index p) {
  if (theta.theta.size() != LogCholeskyParams::size_for(p)) {
    throw DimensionMismatch("log-Cholesky vector has length " +
                            std::to_string(theta.theta.size()) + ", expected " +
                            std::to_string(LogCholeskyParams::size_for(p)));
  }
  if (!theta.theta.allFinite()) throw InvalidArgument("log-Cholesky vector must be finite");
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(p, p);
  Eigen::Index k = p;
  for (Eigen::Index i = 0; i < p; ++i) {
    upper(i, i) = std::exp(theta.theta[k++]);
    for (Eigen::Index j = i + 1; j < p; ++j) upper(i, j) = theta.theta[k++];
  }
  // Assembled directly: the product of a triangular factor with positive diagonal is PD.
  WnParams out;
  out.mu = theta.theta.head(p);
  out.sigma = upper.transpose() * upper;
  return out;
}

}  // namespace wntorus
