#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wntorus::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kBadInput = 1, kDegenerate = 2 };

struct CsvTable {
  std::vector<std::string> header;  ///< empty when the file has no header row
  Eigen::MatrixXd values;
};

/// Comma-separated numbers, one observation per row, with an optional header row.
/// Throws InvalidArgument naming the file on empty, ragged or non-numeric input.
CsvTable read_csv(const std::string& path);

struct FitRequest {
  std::string input;
  std::string method = "em";  ///< em, cem, direct, cem-then-em
  int J = 3;
  int max_iter = 500;
  double tol = 1e-8;
  std::vector<int> linear_columns;  ///< zero-based; non-empty activates mixed estimation
  std::optional<std::string> output;            ///< JSON destination, stdout when unset
  std::optional<std::string> unwrapped_output;  ///< CSV of the CEM reconstruction
  bool degrees = false;
};

int cmd_fit(const FitRequest& request, std::ostream& out, std::ostream& err);

struct SimulateRequest {
  std::string config;
  std::optional<std::string> output;  ///< report CSV, stdout when unset
};

int cmd_simulate(const SimulateRequest& request, std::ostream& out, std::ostream& err);

int cmd_gencor(int p, double cn, std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Thread count from WNTORUS_THREADS, overridden by a positive flag value.
int resolve_threads(int flag_value);

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace wntorus::cli
