#include "wntorus/circular.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "wntorus/error.hpp"
#include "wntorus/linalg.hpp"

namespace wntorus {

namespace {

// Below this the resultant vector is treated as zero and the mean direction undefined.
constexpr double kResultantFloor = 1e-12;
// Mean squared sine below this means the sample has no spread about its mean.
constexpr double kSpreadFloor = 1e-24;

struct Resultant {
  double c = 0.0;
  double s = 0.0;
  double length() const { return std::hypot(c, s); }
};

Resultant mean_resultant(std::span<const double> angles) {
  if (angles.empty()) throw InvalidArgument("circular statistic of an empty sample");
  Resultant r;
  for (double a : angles) {
    r.c += std::cos(a);
    r.s += std::sin(a);
  }
  const auto n = static_cast<double>(angles.size());
  r.c /= n;
  r.s /= n;
  return r;
}

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a) + " and " +
                            std::to_string(b) + " differ");
  }
}

}  // namespace

Angle::Angle(double radians) {
  if (!std::isfinite(radians)) throw InvalidArgument("angle must be finite");
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // r + 2pi can round up to exactly 2pi for tiny negative r.
  if (r >= kTwoPi) r = 0.0;
  value_ = r;
}

Angle wrap_angle(double x) { return Angle(x); }

double centered_difference(double a, double b) {
  double d = wrap_angle(wrap_angle(a).radians() - b).radians();
  if (d > std::numbers::pi) d -= kTwoPi;
  return d;
}

Eigen::VectorXd center_to(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::VectorXd>& mu) {
  require_same_size(y.size(), mu.size(), "center_to");
  Eigen::VectorXd out(y.size());
  for (Eigen::Index r = 0; r < y.size(); ++r) out[r] = mu[r] + centered_difference(y[r], mu[r]);
  return out;
}

Eigen::VectorXi centering_offset(const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& mu) {
  require_same_size(y.size(), mu.size(), "centering_offset");
  Eigen::VectorXi k(y.size());
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double d = centered_difference(y[r], mu[r]);
    k[r] = static_cast<int>(std::lround((mu[r] + d - y[r]) / kTwoPi));
  }
  return k;
}

Angle circular_mean(std::span<const double> angles) {
  const Resultant r = mean_resultant(angles);
  if (r.length() < kResultantFloor) {
    throw DegenerateStatistic("circular mean undefined: mean resultant length is zero");
  }
  return wrap_angle(std::atan2(r.s, r.c));
}

double mean_resultant_length(std::span<const double> angles) {
  return std::min(1.0, mean_resultant(angles).length());
}

double circular_correlation(std::span<const double> x, std::span<const double> y) {
  require_same_size(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()),
                    "circular_correlation");
  if (x.size() < 2) throw InvalidArgument("circular correlation needs at least two pairs");
  const double xbar = circular_mean(x).radians();
  const double ybar = circular_mean(y).radians();
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sx = std::sin(x[i] - xbar);
    const double sy = std::sin(y[i] - ybar);
    sxy += sx * sy;
    sxx += sx * sx;
    syy += sy * sy;
  }
  const auto n = static_cast<double>(x.size());
  if (sxx / n < kSpreadFloor || syy / n < kSpreadFloor) {
    throw DegenerateStatistic("circular correlation undefined: a sample has no spread");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double angle_separation(const Eigen::Ref<const Eigen::VectorXd>& mu_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& mu0) {
  require_same_size(mu_hat.size(), mu0.size(), "angle_separation");
  double as = 0.0;
  for (Eigen::Index r = 0; r < mu_hat.size(); ++r) as += 1.0 - std::cos(mu_hat[r] - mu0[r]);
  return as;
}

WnParams initial_params(const TorusSample& sample, CovarianceInit mode) {
  InitDiagnostics ignored;
  return initial_params(sample, ignored, mode);
}

WnParams initial_params(const TorusSample& sample, InitDiagnostics& diagnostics,
                        CovarianceInit mode) {
  const Eigen::Index n = sample.n();
  const Eigen::Index p = sample.p();
  if (n < 2) throw DegenerateInitialization("initial values need at least two observations");

  std::vector<Eigen::VectorXd> columns(static_cast<std::size_t>(p));
  Eigen::VectorXd mu(p);
  Eigen::VectorXd var(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    columns[r] = sample.col(r);
    std::span<const double> col(columns[r].data(), static_cast<std::size_t>(n));
    const double rho = mean_resultant_length(col);
    if (rho < kResultantFloor) {
      throw DegenerateInitialization("column " + std::to_string(r) +
                                     " has zero mean resultant length (infinite variance); "
                                     "jitter the data or supply starting values");
    }
    mu[r] = circular_mean(col).radians();
    var[r] = -2.0 * std::log(rho);
    if (!(var[r] > 0.0)) {
      throw DegenerateInitialization("column " + std::to_string(r) +
                                     " is constant (zero variance); jitter the data");
    }
  }

  Eigen::MatrixXd sigma = var.asDiagonal();
  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index s = r + 1; s < p; ++s) {
      std::span<const double> cr(columns[r].data(), static_cast<std::size_t>(n));
      std::span<const double> cs(columns[s].data(), static_cast<std::size_t>(n));
      const double rho_c = circular_correlation(cr, cs);
      const double scale = mode == CovarianceInit::standard_deviation
                               ? std::sqrt(var[r] * var[s])
                               : var[r] * var[s];
      sigma(r, s) = sigma(s, r) = rho_c * scale;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
  diagnostics.min_eigenvalue_before = eig.eigenvalues()[0];
  diagnostics.pd_repaired = linalg::clip_eigenvalues(sigma, 1e-6);
  return WnParams(std::move(mu), std::move(sigma));
}

}  // namespace wntorus
