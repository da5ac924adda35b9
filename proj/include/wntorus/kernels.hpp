#pragma once

#include <vector>

#include <Eigen/Core>

#include "wntorus/params.hpp"
#include "wntorus/sample.hpp"

/// Per-observation lattice kernels shared by the likelihood and the EM family.
///
/// Every kernel maps observations independently (optionally under OpenMP) into
/// preallocated per-observation slots; reductions over observations are done by the
/// caller in index order, so results do not depend on the thread count.
namespace wntorus::kernels {

enum class Exec { serial, parallel };

/// Gaussian log density evaluated on the shifted points d + 2*pi*J_r of a lattice.
///
/// With sigma = L L^T, the Mahalanobis term of d + 2*pi*J_r is |L^{-1} d + s_r|^2 where
/// s_r = 2*pi*L^{-1} J_r does not depend on the observation. The shifts are computed
/// once, so each lattice row costs O(p) per observation.
class LatticeGaussian {
 public:
  LatticeGaussian(const WnParams& params, const Lattice& lattice);
  /// From a lower-triangular factor with positive diagonal; `log_diag` holds the logs of
  /// that diagonal so the normalizing constant stays finite under underflow.
  LatticeGaussian(Eigen::MatrixXd lower, const Eigen::VectorXd& log_diag, const Lattice& lattice);

  /// out[r] = log N(d + 2*pi*J_r; 0, sigma). `out` must have lattice.size() entries.
  void log_terms(const Eigen::Ref<const Eigen::VectorXd>& d, Eigen::Ref<Eigen::VectorXd> out) const;

  const Lattice& lattice() const noexcept { return *lattice_; }
  /// Lattice rows as a p x rows matrix of doubles.
  const Eigen::MatrixXd& offsets() const noexcept { return offsets_; }

 private:
  void build_shifts();

  const Lattice* lattice_;
  Eigen::MatrixXd lower_;
  Eigen::MatrixXd offsets_;
  Eigen::MatrixXd shifts_;
  double log_norm_ = 0.0;
};

/// Stable log(sum(exp(v))).
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

enum class Moments { none, means, full };

/// Everything the E step needs for a sample at fixed parameters.
struct PosteriorSummary {
  /// Integer k_i with y_i + 2*pi*k_i the representative centered on mu.
  Eigen::MatrixXi center_offsets;
  /// Recentered deviation y_i + 2*pi*k_i - mu, each entry in (-pi, pi].
  Eigen::MatrixXd deviations;
  /// Truncated wrapped log density of each observation.
  Eigen::VectorXd log_density;
  /// First lattice row of maximal posterior weight.
  std::vector<Eigen::Index> map_row;
  /// Posterior mean of the unwrapped point minus mu (Moments::means and above).
  Eigen::MatrixXd mean_deviation;
  /// Posterior covariance of the unwrapped point (Moments::full only).
  std::vector<Eigen::MatrixXd> covariance;
};

PosteriorSummary posterior_summary(const TorusSample& sample, const WnParams& params,
                                   const Lattice& lattice, Moments moments, Exec exec);

/// Same computation driven by an existing LatticeGaussian whose mean is `mu`.
PosteriorSummary posterior_summary(const TorusSample& sample,
                                   const Eigen::Ref<const Eigen::VectorXd>& mu,
                                   const LatticeGaussian& gauss, Moments moments, Exec exec);

double log_likelihood(const TorusSample& sample, const WnParams& params, const Lattice& lattice,
                      Exec exec);

}  // namespace wntorus::kernels
