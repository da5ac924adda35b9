#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace wntorus {

/// n observations on the p-torus, stored row-wise as canonical angles in [0, 2pi).
class TorusSample {
 public:
  TorusSample() = default;
  /// Wraps every entry into [0, 2pi). Throws on empty or non-finite input.
  explicit TorusSample(Eigen::MatrixXd angles);

  Eigen::Index n() const noexcept { return angles_.rows(); }
  Eigen::Index p() const noexcept { return angles_.cols(); }

  const Eigen::MatrixXd& angles() const noexcept { return angles_; }
  auto row(Eigen::Index i) const { return angles_.row(i); }
  auto col(Eigen::Index r) const { return angles_.col(r); }

  /// Number of input entries that lay outside [0, 2pi) and were wrapped.
  std::size_t wrapped_count() const noexcept { return wrapped_; }

 private:
  Eigen::MatrixXd angles_;
  std::size_t wrapped_ = 0;
};

}  // namespace wntorus
