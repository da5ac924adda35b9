#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace wntorus {

/// Parameters of a wrapped normal on the p-torus: mean angles and the covariance of
/// the underlying normal.
struct WnParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  WnParams() = default;
  /// Validates shapes, symmetry (1e-10 relative) and positive definiteness.
  WnParams(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  Eigen::Index p() const noexcept { return mu.size(); }
  /// Copy with every mean component wrapped into [0, 2pi).
  WnParams canonical() const;
};

/// Truncation of the wrapping-coefficient lattice to {-J..J}^p.
struct LatticeConfig {
  static constexpr std::int64_t kMaxRows = 100'000'000;

  int J = 3;

  /// (2J+1)^p, throwing LatticeTooLarge past kMaxRows.
  std::int64_t row_count(Eigen::Index p) const;
};

/// All lattice rows in lexicographic order, smallest first. Row r is a p-vector of
/// integers in [-J, J].
class Lattice {
 public:
  Lattice(const LatticeConfig& config, Eigen::Index p);

  Eigen::Index size() const noexcept { return rows_.rows(); }
  Eigen::Index p() const noexcept { return rows_.cols(); }
  int J() const noexcept { return J_; }
  const Eigen::MatrixXi& rows() const noexcept { return rows_; }
  auto row(Eigen::Index r) const { return rows_.row(r); }
  /// Index of the all-zero row.
  Eigen::Index zero_row() const noexcept { return (size() - 1) / 2; }

 private:
  int J_;
  Eigen::MatrixXi rows_;
};

}  // namespace wntorus
