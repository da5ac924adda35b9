#pragma once

#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace wntorus::linalg {

/// Lower Cholesky factor, or nullopt if `m` is not numerically positive definite.
std::optional<Eigen::MatrixXd> cholesky_lower(const Eigen::MatrixXd& m);

bool is_positive_definite(const Eigen::MatrixXd& m);

/// (m + m^T) / 2
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

/// Floors eigenvalues at `relative_floor` times the largest eigenvalue and
/// reassembles. Returns true if any eigenvalue was raised.
bool clip_eigenvalues(Eigen::MatrixXd& m, double relative_floor);

/// Column means and covariance with divisor n.
Eigen::VectorXd column_mean(const Eigen::MatrixXd& x);
Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& x);
/// Cross covariance between the columns of x and y, divisor n.
Eigen::MatrixXd population_cross_covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Ratio of extreme eigenvalues of a symmetric positive definite matrix.
double condition_number(const Eigen::MatrixXd& m);

}  // namespace wntorus::linalg
