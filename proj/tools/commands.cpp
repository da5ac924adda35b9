#include "commands.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wntorus/cem.hpp"
#include "wntorus/circular.hpp"
#include "wntorus/direct.hpp"
#include "wntorus/em.hpp"
#include "wntorus/error.hpp"
#include "wntorus/experiment.hpp"
#include "wntorus/mixed.hpp"
#include "wntorus/simulate.hpp"

namespace wntorus::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> to_number(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return std::nullopt;
  s = s.substr(b, e - b + 1);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const DegenerateInitialization*>(&e) || dynamic_cast<const DegenerateEstimate*>(&e) ||
      dynamic_cast<const DegenerateStatistic*>(&e) || dynamic_cast<const SingularCovariance*>(&e) ||
      dynamic_cast<const NumericalFailure*>(&e) || dynamic_cast<const ConvergenceFailure*>(&e)) {
    return kDegenerate;
  }
  return kBadInput;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open input file " + path);
  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = to_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        table.header = fields;
        width = fields.size();
        continue;
      }
      throw InvalidArgument(path + ": non-numeric value on line " + std::to_string(line_no));
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw InvalidArgument(path + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(values.size()) + " fields, expected " +
                            std::to_string(width));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidArgument(path + ": no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

int cmd_fit(const FitRequest& req, std::ostream& out, std::ostream& err) {
  json warnings = json::array();
  try {
    static const std::set<std::string> methods{"em", "cem", "direct", "cem-then-em"};
    if (!methods.count(req.method)) {
      throw InvalidArgument("unknown method '" + req.method +
                            "'; valid methods: em, cem, direct, cem-then-em");
    }
    if (req.J < 0) throw InvalidArgument("J must be nonnegative");
    const CsvTable table = read_csv(req.input);
    const auto cols = static_cast<int>(table.values.cols());

    std::set<int> linear(req.linear_columns.begin(), req.linear_columns.end());
    for (int c : linear) {
      if (c < 0 || c >= cols) {
        throw InvalidArgument("linear column " + std::to_string(c) + " outside 0.." +
                              std::to_string(cols - 1));
      }
    }
    std::vector<int> torus_cols;
    for (int c = 0; c < cols; ++c) {
      if (!linear.count(c)) torus_cols.push_back(c);
    }
    if (torus_cols.empty()) throw InvalidArgument("no torus columns left after removing linear columns");

    Eigen::MatrixXd angles(table.values.rows(), static_cast<Eigen::Index>(torus_cols.size()));
    for (std::size_t k = 0; k < torus_cols.size(); ++k) {
      angles.col(static_cast<Eigen::Index>(k)) = table.values.col(torus_cols[k]);
    }
    if (req.degrees) angles *= std::numbers::pi / 180.0;
    const TorusSample sample(std::move(angles));
    if (sample.wrapped_count() > 0) {
      const std::string w = std::to_string(sample.wrapped_count()) +
                            " value(s) outside [0, 2pi) were wrapped into range";
      warnings.push_back(w);
      err << "warning: " << w << '\n';
    }

    const LatticeConfig lattice{req.J};
    IterControl iter;
    iter.max_iter = req.max_iter;
    iter.tol = req.tol;

    json result;
    result["method"] = req.method;
    result["p"] = sample.p();
    result["n"] = sample.n();
    bool degenerate = false;

    if (!linear.empty()) {
      if (req.method != "em" && req.method != "cem") {
        throw InvalidArgument("mixed torus/linear estimation supports methods em and cem");
      }
      Eigen::MatrixXd lin(table.values.rows(), static_cast<Eigen::Index>(linear.size()));
      Eigen::Index k = 0;
      for (int c : linear) lin.col(k++) = table.values.col(c);
      const MixedSample mixed(sample, std::move(lin));
      const MixedFit fit = req.method == "em" ? fit_mixed_em(mixed, lattice, iter)
                                              : fit_mixed_cem(mixed, lattice, iter);
      result["mu"] = vector_json(fit.params.mu1);
      result["sigma"] = matrix_json(fit.params.sigma11);
      result["loglik"] = fit.torus_fit.loglik;
      result["iterations"] = fit.torus_fit.iterations;
      result["converged"] = fit.torus_fit.converged;
      result["reason"] = std::string(to_string(fit.torus_fit.reason));
      result["linear"] = {{"columns", json(std::vector<int>(linear.begin(), linear.end()))},
                          {"mu", vector_json(fit.params.mu2)},
                          {"sigma12", matrix_json(fit.params.sigma12)},
                          {"sigma22", matrix_json(fit.params.sigma22)},
                          {"repaired", fit.repaired}};
      if (fit.repaired) warnings.push_back("joint covariance repaired by eigenvalue clipping");
      degenerate = fit.torus_fit.reason == StopReason::degenerate;
    } else {
      InitDiagnostics diag;
      const WnParams init = initial_params(sample, diag);
      if (diag.pd_repaired) warnings.push_back("initial covariance repaired by eigenvalue clipping");
      FitResult fit;
      if (req.method == "em") {
        fit = fit_em(sample, init, lattice, iter);
      } else if (req.method == "direct") {
        OptimizerControl optim;
        fit = fit_direct(sample, init, lattice, optim);
      } else {
        const CemFitResult cem = fit_cem(sample, init, lattice, iter);
        result["wrapping_coefficients"] = matrix_json(cem.offsets);
        result["unwrapped_path"] = nullptr;
        if (req.unwrapped_output) {
          write_matrix_csv(*req.unwrapped_output, cem.unwrapped);
          result["unwrapped_path"] = *req.unwrapped_output;
        }
        if (req.method == "cem") {
          fit = cem;
        } else {
          fit = fit_em(sample, cem.params, lattice, iter);
          fit.iterations += cem.iterations;
        }
      }
      result["mu"] = vector_json(fit.params.mu);
      result["sigma"] = matrix_json(fit.params.sigma);
      result["loglik"] = fit.loglik;
      result["iterations"] = fit.iterations;
      result["converged"] = fit.converged;
      result["reason"] = std::string(to_string(fit.reason));
      degenerate = fit.reason == StopReason::degenerate;
    }
    result["warnings"] = warnings;

    const std::string text = result.dump(2) + "\n";
    if (req.output) {
      std::ofstream f(*req.output);
      if (!f) throw InvalidArgument("cannot write " + *req.output);
      f << text;
    } else {
      out << text;
    }
    if (degenerate) {
      err << "error: estimation degenerated (covariance collapsed)\n";
      return kDegenerate;
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_simulate(const SimulateRequest& req, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(req.config);
    if (!in) throw InvalidArgument("cannot open config file " + req.config);
    const ExperimentConfig cfg = parse_experiment_config(in);
    cfg.validate();
    const ExperimentReport report = run_experiment(cfg);

    if (req.output) {
      std::ofstream f(req.output->c_str(), std::ios::binary);
      if (!f) throw InvalidArgument("cannot write " + *req.output);
      write_csv(report, f);
    } else {
      write_csv(report, out);
    }
    std::ostream& summary = req.output ? out : err;
    char buf[256];
    for (const auto& s : summarize(report)) {
      std::snprintf(buf, sizeof buf,
                    "p=%d n=%d sigma=%.6g method=%s ok=%d median_wilks=%.6g median_as=%.6g "
                    "median_delta=%.6g\n",
                    s.p, s.n, s.sigma, s.method.c_str(), s.ok_rows, s.median_wilks,
                    s.median_angle_sep, s.median_scatter_div);
      summary << buf;
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_gencor(int p, double cn, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  try {
    const CorrelationResult r = random_correlation(CorrelationSpec{p, cn}, seed);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", r.condition_number);
    out << "# condition_number = " << buf << '\n';
    for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", r.matrix(i, j));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WNTORUS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

int run(int argc, char** argv) {
  CLI::App app{"Wrapped normal estimation on the torus"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: $WNTORUS_THREADS or all cores)");

  FitRequest fit;
  std::string output;
  std::string unwrapped;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a wrapped normal to CSV data");
  fit_cmd->add_option("input", fit.input, "CSV file, one observation per row")->required();
  fit_cmd->add_option("-m,--method", fit.method, "em, cem, direct or cem-then-em");
  fit_cmd->add_option("-J,--truncation", fit.J, "Lattice truncation J");
  fit_cmd->add_option("--max-iter", fit.max_iter, "Iteration limit");
  fit_cmd->add_option("--tol", fit.tol, "Convergence tolerance on the log-likelihood");
  fit_cmd->add_option("--linear-columns", fit.linear_columns,
                      "Zero-based columns holding linear (non-angular) variables")
      ->delimiter(',');
  fit_cmd->add_option("-o,--output", output, "Write JSON here instead of stdout");
  fit_cmd->add_option("--unwrapped-output", unwrapped, "CSV for the CEM reconstruction");
  fit_cmd->add_flag("--degrees", fit.degrees, "Input angles are in degrees");

  SimulateRequest sim;
  std::string report;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  sim_cmd->add_option("config", sim.config, "key = value configuration file")->required();
  sim_cmd->add_option("-o,--output", report, "Write the report CSV here instead of stdout");

  int p = 2;
  double cn = 20.0;
  std::uint64_t seed = 1;
  auto* cor_cmd = app.add_subcommand("gencor", "Random correlation matrix with fixed condition number");
  cor_cmd->add_option("-p,--dim", p, "Dimension")->required();
  cor_cmd->add_option("--cn", cn, "Condition number");
  cor_cmd->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  omp_set_num_threads(resolve_threads(threads));

  if (*fit_cmd) {
    if (!output.empty()) fit.output = output;
    if (!unwrapped.empty()) fit.unwrapped_output = unwrapped;
    return cmd_fit(fit, std::cout, std::cerr);
  }
  if (*sim_cmd) {
    if (!report.empty()) sim.output = report;
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  return cmd_gencor(p, cn, seed, std::cout, std::cerr);
}

}  // namespace wntorus::cli
