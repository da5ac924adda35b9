#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wntorus/direct.hpp"
#include "wntorus/fit.hpp"
#include "wntorus/simulate.hpp"

namespace wntorus {

enum class Estimator { em, cem, direct, cem_then_em };

/// An estimator plus its starting point: the moment-based initial values, or the true
/// parameters (label suffix "T").
struct MethodSpec {
  Estimator estimator = Estimator::em;
  bool from_truth = false;

  std::string label() const;
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

/// Parses "em", "cem", "direct", "cem-em", each optionally suffixed with "T".
/// Throws InvalidArgument listing the valid names.
MethodSpec parse_method(std::string_view name);
std::string valid_method_names();

/// Parses a standard deviation: a number or one of pi/8, pi/4, pi/2, pi, 3pi/2, 2pi.
double parse_sigma(std::string_view token);

struct ExperimentCell {
  int p = 1;
  int n = 10;
};

struct ExperimentConfig {
  /// Explicit (p, n) pairs; when empty, the cross product of p_list and n_list.
  std::vector<ExperimentCell> pairs;
  std::vector<int> p_list{1};
  std::vector<int> n_list{100};
  std::vector<double> sigma_list{0.7853981633974483};
  int replications = 1;
  double cn = 20.0;
  std::vector<MethodSpec> methods{MethodSpec{}};
  int J = 3;
  std::uint64_t seed = 1;
  IterControl iter;
  OptimizerControl optim;
  /// Record wall-clock times. Off by default so reports are byte-reproducible.
  bool timing = false;

  std::vector<ExperimentCell> cells() const;
  /// Throws InvalidArgument for empty lists or bad values and DimensionGuard when a
  /// direct method is requested above its dimension limit.
  void validate() const;
};

/// Flat key = value lines; '#' starts a comment; lists are comma separated.
/// Keys: p, n, pairs (e.g. "2x100, 5x50"), sigma, reps, cn, methods, J, seed, max_iter,
/// tol, max_evals, timing.
ExperimentConfig parse_experiment_config(std::istream& in);

struct ExperimentRow {
  int p = 0;
  int n = 0;
  double sigma = 0.0;
  std::string method;
  int replicate = 0;
  MetricsReport metrics;
  bool converged = false;
  int iterations = 0;
  std::string status = "ok";
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  bool timing = false;
};

/// Runs every (cell, sigma, replicate) with a fresh random correlation matrix and
/// sample, fitting each requested method. Replicates draw from RNG streams derived from
/// (seed, cell, sigma, replicate), so results do not depend on execution order. Fit
/// failures are recorded in the row status.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                kernels::Exec exec = kernels::Exec::parallel);

void write_csv(const ExperimentReport& report, std::ostream& out);

struct CellSummary {
  int p = 0;
  int n = 0;
  double sigma = 0.0;
  std::string method;
  int ok_rows = 0;
  double median_wilks = 0.0;
  double median_angle_sep = 0.0;
  double median_scatter_div = 0.0;
};

/// Medians per (p, n, sigma, method) over rows with status "ok", in report order.
std::vector<CellSummary> summarize(const ExperimentReport& report);

}  // namespace wntorus
