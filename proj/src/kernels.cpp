#include "wntorus/kernels.hpp"

#include <cmath>
#include <limits>

#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/linalg.hpp"

namespace wntorus::kernels {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

}  // namespace

LatticeGaussian::LatticeGaussian(const WnParams& params, const Lattice& lattice)
    : lattice_(&lattice) {
  if (params.p() != lattice.p()) throw DimensionMismatch("lattice and parameter dimensions differ");
  auto l = linalg::cholesky_lower(params.sigma);
  if (!l) throw SingularCovariance("covariance is not positive definite");
  lower_ = std::move(*l);
  const double p = static_cast<double>(params.p());
  log_norm_ = -0.5 * p * kLogTwoPi - lower_.diagonal().array().log().sum();
  build_shifts();
}

LatticeGaussian::LatticeGaussian(Eigen::MatrixXd lower, const Eigen::VectorXd& log_diag,
                                 const Lattice& lattice)
    : lattice_(&lattice), lower_(std::move(lower)) {
  if (lower_.rows() != lattice.p()) throw DimensionMismatch("lattice and factor dimensions differ");
  const double p = static_cast<double>(lattice.p());
  log_norm_ = -0.5 * p * kLogTwoPi - log_diag.sum();
  build_shifts();
}

void LatticeGaussian::build_shifts() {
  offsets_ = lattice_->rows().transpose().cast<double>();
  shifts_ = lower_.triangularView<Eigen::Lower>().solve(kTwoPi * offsets_);
}

void LatticeGaussian::log_terms(const Eigen::Ref<const Eigen::VectorXd>& d,
                                Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::VectorXd a = lower_.triangularView<Eigen::Lower>().solve(d);
  const Eigen::Index p = a.size();
  const Eigen::Index rows = shifts_.cols();
  const double* s = shifts_.data();
  for (Eigen::Index r = 0; r < rows; ++r, s += p) {
    double q = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double v = a[k] + s[k];
      q += v * v;
    }
    out[r] = log_norm_ - 0.5 * q;
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

PosteriorSummary posterior_summary(const TorusSample& sample, const WnParams& params,
                                   const Lattice& lattice, Moments moments, Exec exec) {
  const LatticeGaussian gauss(params, lattice);
  return posterior_summary(sample, params.mu, gauss, moments, exec);
}

PosteriorSummary posterior_summary(const TorusSample& sample,
                                   const Eigen::Ref<const Eigen::VectorXd>& mu,
                                   const LatticeGaussian& gauss, Moments moments, Exec exec) {
  const Eigen::Index n = sample.n();
  const Eigen::Index p = sample.p();
  if (mu.size() != p) throw DimensionMismatch("sample and parameter dimensions differ");
  const Eigen::Index rows = gauss.lattice().size();
  const Eigen::MatrixXd& jr = gauss.offsets();
  const Eigen::MatrixXd& y = sample.angles();

  PosteriorSummary out;
  out.center_offsets.resize(n, p);
  out.deviations.resize(n, p);
  out.log_density.resize(n);
  out.map_row.assign(static_cast<std::size_t>(n), 0);
  if (moments != Moments::none) out.mean_deviation.resize(n, p);
  if (moments == Moments::full) out.covariance.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());

#pragma omp parallel if (exec == Exec::parallel)
  {
    Eigen::VectorXd d(p);
    Eigen::VectorXd terms(rows);
    Eigen::VectorXd w(rows);
    Eigen::VectorXd m(p);
    Eigen::VectorXd v(p);
    Eigen::MatrixXd cov(p, p);

#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index r = 0; r < p; ++r) {
        d[r] = centered_difference(y(i, r), mu[r]);
        out.center_offsets(i, r) = static_cast<int>(std::lround((mu[r] + d[r] - y(i, r)) / kTwoPi));
      }
      out.deviations.row(i) = d.transpose();
      gauss.log_terms(d, terms);

      Eigen::Index best = 0;
      double top = terms[0];
      for (Eigen::Index r = 1; r < rows; ++r) {
        if (terms[r] > top) {
          top = terms[r];
          best = r;
        }
      }
      double total = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        w[r] = std::exp(terms[r] - top);
        total += w[r];
      }
      out.log_density[i] = top + std::log(total);
      out.map_row[static_cast<std::size_t>(i)] = best;
      if (moments == Moments::none) continue;

      w /= total;
      m.setZero();
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (w[r] == 0.0) continue;
        m.noalias() += w[r] * jr.col(r);
      }
      out.mean_deviation.row(i) = (d + kTwoPi * m).transpose();
      if (moments != Moments::full) continue;

      cov.setZero();
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (w[r] == 0.0) continue;
        v = jr.col(r) - m;
        for (Eigen::Index a = 0; a < p; ++a) {
          const double wa = w[r] * v[a];
          for (Eigen::Index b = 0; b <= a; ++b) cov(a, b) += wa * v[b];
        }
      }
      cov = cov.selfadjointView<Eigen::Lower>();
      out.covariance[static_cast<std::size_t>(i)] = (kTwoPi * kTwoPi) * cov;
    }
  }
  return out;
}

double log_likelihood(const TorusSample& sample, const WnParams& params, const Lattice& lattice,
                      Exec exec) {
  const PosteriorSummary s = posterior_summary(sample, params, lattice, Moments::none, exec);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.log_density.size(); ++i) total += s.log_density[i];
  return total;
}

}  // namespace wntorus::kernels
