#include "wntorus/reference.hpp"

#include <cmath>

#include "wntorus/circular.hpp"
#include "wntorus/model.hpp"

namespace wntorus::reference {

kernels::PosteriorSummary posterior_summary(const TorusSample& sample, const WnParams& params,
                                            const LatticeConfig& config) {
  const Lattice lattice(config, params.p());
  const Eigen::Index n = sample.n();
  const Eigen::Index p = sample.p();
  const Eigen::Index rows = lattice.size();

  kernels::PosteriorSummary out;
  out.center_offsets.resize(n, p);
  out.deviations.resize(n, p);
  out.log_density.resize(n);
  out.map_row.resize(static_cast<std::size_t>(n));
  out.mean_deviation.resize(n, p);
  out.covariance.resize(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd y = sample.row(i).transpose();
    const Eigen::VectorXd yc = center_to(y, params.mu);
    out.center_offsets.row(i) = centering_offset(y, params.mu).transpose();
    out.deviations.row(i) = (yc - params.mu).transpose();

    std::vector<Eigen::VectorXd> points;
    Eigen::VectorXd logp(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      points.push_back(yc + kTwoPi * lattice.row(r).transpose().cast<double>());
      logp[r] = mvn_logpdf(points.back(), params);
    }
    Eigen::Index best = 0;
    logp.maxCoeff(&best);
    out.map_row[static_cast<std::size_t>(i)] = best;
    out.log_density[i] = kernels::log_sum_exp(logp);

    const Eigen::VectorXd w = (logp.array() - out.log_density[i]).exp().matrix();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (Eigen::Index r = 0; r < rows; ++r) mean += w[r] * points[r];
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::VectorXd c = points[r] - mean;
      cov += w[r] * c * c.transpose();
    }
    out.mean_deviation.row(i) = (mean - params.mu).transpose();
    out.covariance[static_cast<std::size_t>(i)] = cov;
  }
  return out;
}

double log_likelihood(const TorusSample& sample, const WnParams& params,
                      const LatticeConfig& config) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    const Eigen::VectorXd yc = center_to(sample.row(i).transpose(), params.mu);
    const Lattice lattice(config, params.p());
    Eigen::VectorXd logp(lattice.size());
    for (Eigen::Index r = 0; r < lattice.size(); ++r) {
      logp[r] = mvn_logpdf(yc + kTwoPi * lattice.row(r).transpose().cast<double>(), params);
    }
    total += kernels::log_sum_exp(logp);
  }
  return total;
}

}  // namespace wntorus::reference
