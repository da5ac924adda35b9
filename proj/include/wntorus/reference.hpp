#pragma once

#include "wntorus/kernels.hpp"

/// Straightforward serial implementations of the lattice kernels: one dense Gaussian
/// evaluation per lattice point and textbook weighted moments. Slow; kept as the
/// baseline the OpenMP kernels are tested and benchmarked against.
namespace wntorus::reference {

kernels::PosteriorSummary posterior_summary(const TorusSample& sample, const WnParams& params,
                                            const LatticeConfig& config);

double log_likelihood(const TorusSample& sample, const WnParams& params,
                      const LatticeConfig& config);

}  // namespace wntorus::reference
