#include "wntorus/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace wntorus::linalg {

std::optional<Eigen::MatrixXd> cholesky_lower(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return std::nullopt;
  }
  return l;
}

bool is_positive_definite(const Eigen::MatrixXd& m) { return cholesky_lower(m).has_value(); }

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

bool clip_eigenvalues(Eigen::MatrixXd& m, double relative_floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(m));
  Eigen::VectorXd values = eig.eigenvalues();
  const double floor = relative_floor * values.maxCoeff();
  bool clipped = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < floor) {
      values[i] = floor;
      clipped = true;
    }
  }
  if (!clipped && is_positive_definite(m)) return false;
  const Eigen::MatrixXd& u = eig.eigenvectors();
  m = symmetrize(u * values.asDiagonal() * u.transpose());
  return true;
}

Eigen::VectorXd column_mean(const Eigen::MatrixXd& x) { return x.colwise().mean().transpose(); }

Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& x) {
  return population_cross_covariance(x, x);
}

Eigen::MatrixXd population_cross_covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  return xc.transpose() * yc / static_cast<double>(x.rows());
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
}

}  // namespace wntorus::linalg
