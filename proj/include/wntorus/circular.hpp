#pragma once

#include <numbers>
#include <span>

#include <Eigen/Core>

#include "wntorus/params.hpp"
#include "wntorus/sample.hpp"

namespace wntorus {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// An angle in canonical form, radians in [0, 2pi).
class Angle {
 public:
  Angle() = default;
  /// Wraps `radians` into [0, 2pi). Throws InvalidArgument on non-finite input.
  explicit Angle(double radians);

  double radians() const noexcept { return value_; }
  explicit operator double() const noexcept { return value_; }

  friend bool operator==(Angle, Angle) = default;

 private:
  double value_ = 0.0;
};

/// x mod 2pi in [0, 2pi). Idempotent on canonical input.
Angle wrap_angle(double x);

/// Difference a - b mapped into (-pi, pi]. A difference of exactly -pi maps to +pi.
double centered_difference(double a, double b);

/// Representative of y whose deviation from mu has every component in (-pi, pi].
Eigen::VectorXd center_to(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::VectorXd>& mu);

/// Integer vector k such that y + 2*pi*k - mu lies in (-pi, pi]^p.
Eigen::VectorXi centering_offset(const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& mu);

Angle circular_mean(std::span<const double> angles);
double mean_resultant_length(std::span<const double> angles);

/// Circular correlation of two paired samples about their circular means.
double circular_correlation(std::span<const double> x, std::span<const double> y);

/// Sum over components of 1 - cos(mu_hat - mu0); lies in [0, 2p].
double angle_separation(const Eigen::Ref<const Eigen::VectorXd>& mu_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& mu0);

/// How off-diagonal starting covariances are scaled from circular correlations.
enum class CovarianceInit {
  standard_deviation,  ///< rho_c * sqrt(s_rr * s_ss)
  printed_variance,    ///< rho_c * s_rr * s_ss
};

struct InitDiagnostics {
  bool pd_repaired = false;
  double min_eigenvalue_before = 0.0;
};

/// Moment-based starting values: circular means, -2 log(rho_hat) variances and
/// circular correlations. A non-positive-definite assembly is repaired by
/// flooring eigenvalues at 1e-6 times the largest.
WnParams initial_params(const TorusSample& sample,
                        CovarianceInit mode = CovarianceInit::standard_deviation);
WnParams initial_params(const TorusSample& sample, InitDiagnostics& diagnostics,
                        CovarianceInit mode = CovarianceInit::standard_deviation);

}  // namespace wntorus
