#include "wntorus/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wntorus/cem.hpp"
#include "wntorus/circular.hpp"
#include "wntorus/em.hpp"
#include "wntorus/error.hpp"

namespace wntorus {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view token, std::string_view key) {
  const std::string t(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || t.empty()) {
    throw InvalidArgument("bad number '" + t + "' for " + std::string(key));
  }
  return v;
}

long long parse_integer(std::string_view token, std::string_view key) {
  const std::string t(token);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || t.empty()) {
    throw InvalidArgument("bad integer '" + t + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view token, std::string_view key) {
  const std::string t(token);
  if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "off" || t == "no" || t == "0") return false;
  throw InvalidArgument("bad boolean '" + t + "' for " + std::string(key));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::string MethodSpec::label() const {
  std::string base;
  switch (estimator) {
    case Estimator::em: base = "em"; break;
    case Estimator::cem: base = "cem"; break;
    case Estimator::direct: base = "direct"; break;
    case Estimator::cem_then_em: base = "cem-em"; break;
  }
  return from_truth ? base + "T" : base;
}

std::string valid_method_names() { return "em, cem, direct, cem-em, emT, cemT, directT, cem-emT"; }

MethodSpec parse_method(std::string_view name) {
  std::string base = trim(name);
  MethodSpec spec;
  if (!base.empty() && base.back() == 'T') {
    spec.from_truth = true;
    base.pop_back();
  }
  if (base == "em") {
    spec.estimator = Estimator::em;
  } else if (base == "cem") {
    spec.estimator = Estimator::cem;
  } else if (base == "direct") {
    spec.estimator = Estimator::direct;
  } else if (base == "cem-em") {
    spec.estimator = Estimator::cem_then_em;
  } else {
    throw InvalidArgument("unknown method '" + std::string(name) + "'; valid methods: " +
                          valid_method_names());
  }
  return spec;
}

double parse_sigma(std::string_view token) {
  constexpr double pi = std::numbers::pi;
  const std::string t = trim(token);
  static const std::map<std::string, double> symbolic{
      {"pi/8", pi / 8}, {"pi/4", pi / 4},      {"pi/2", pi / 2}, {"pi", pi},
      {"3pi/2", 1.5 * pi}, {"3/2pi", 1.5 * pi}, {"2pi", 2 * pi},
  };
  if (const auto it = symbolic.find(t); it != symbolic.end()) return it->second;
  const double v = parse_double(t, "sigma");
  if (!(v > 0.0)) throw InvalidArgument("sigma must be positive, got " + t);
  return v;
}

std::vector<ExperimentCell> ExperimentConfig::cells() const {
  if (!pairs.empty()) return pairs;
  std::vector<ExperimentCell> out;
  for (int p : p_list) {
    for (int n : n_list) out.push_back({p, n});
  }
  return out;
}

void ExperimentConfig::validate() const {
  const auto cs = cells();
  if (cs.empty() || sigma_list.empty() || methods.empty()) {
    throw InvalidArgument("experiment needs at least one cell, sigma and method");
  }
  if (replications < 1) throw InvalidArgument("replications must be at least 1");
  if (J < 0) throw InvalidArgument("J must be nonnegative");
  if (!(cn > 1.0)) throw InvalidArgument("cn must exceed 1");
  for (const auto& c : cs) {
    if (c.p < 1 || c.n < 2) throw InvalidArgument("cells need p >= 1 and n >= 2");
    for (const auto& m : methods) {
      if (m.estimator == Estimator::direct && c.p > optim.max_dimension) {
        throw DimensionGuard("method " + m.label() + " refuses p = " + std::to_string(c.p) +
                             " (direct maximization limit " +
                             std::to_string(optim.max_dimension) + ")");
      }
    }
    LatticeConfig{J}.row_count(c.p);
  }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto items = split_list(value);
    if (items.empty()) throw InvalidArgument("config key '" + key + "' has no value");

    if (key == "p" || key == "n") {
      auto& list = key == "p" ? cfg.p_list : cfg.n_list;
      list.clear();
      for (const auto& it : items) list.push_back(static_cast<int>(parse_integer(it, key)));
    } else if (key == "pairs") {
      cfg.pairs.clear();
      for (const auto& it : items) {
        const auto x = it.find('x');
        if (x == std::string::npos) throw InvalidArgument("pairs entries look like 2x100, got " + it);
        cfg.pairs.push_back({static_cast<int>(parse_integer(trim(it.substr(0, x)), key)),
                             static_cast<int>(parse_integer(trim(it.substr(x + 1)), key))});
      }
    } else if (key == "sigma") {
      cfg.sigma_list.clear();
      for (const auto& it : items) cfg.sigma_list.push_back(parse_sigma(it));
    } else if (key == "reps" || key == "replications") {
      cfg.replications = static_cast<int>(parse_integer(value, key));
    } else if (key == "cn") {
      cfg.cn = parse_double(value, key);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& it : items) cfg.methods.push_back(parse_method(it));
    } else if (key == "J") {
      cfg.J = static_cast<int>(parse_integer(value, key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_integer(value, key));
    } else if (key == "max_iter") {
      cfg.iter.max_iter = static_cast<int>(parse_integer(value, key));
    } else if (key == "tol") {
      cfg.iter.tol = parse_double(value, key);
    } else if (key == "max_evals") {
      cfg.optim.max_evals = static_cast<int>(parse_integer(value, key));
    } else if (key == "timing") {
      cfg.timing = parse_bool(value, key);
    } else {
      throw InvalidArgument("unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
  }
  return cfg;
}

namespace {

struct FitOutcome {
  WnParams params;
  bool converged = false;
  int iterations = 0;
};

FitOutcome run_method(const MethodSpec& m, const TorusSample& sample, const WnParams& start,
                      const ExperimentConfig& cfg, kernels::Exec exec) {
  const LatticeConfig lattice{cfg.J};
  IterControl iter = cfg.iter;
  iter.exec = exec;
  switch (m.estimator) {
    case Estimator::em: {
      const FitResult r = fit_em(sample, start, lattice, iter);
      return {r.params, r.converged, r.iterations};
    }
    case Estimator::cem: {
      const CemFitResult r = fit_cem(sample, start, lattice, iter);
      return {r.params, r.converged, r.iterations};
    }
    case Estimator::direct: {
      OptimizerControl optim = cfg.optim;
      optim.exec = exec;
      const FitResult r = fit_direct(sample, start, lattice, optim);
      return {r.params, r.converged, r.evaluations};
    }
    case Estimator::cem_then_em: {
      const CemFitResult c = fit_cem(sample, start, lattice, iter);
      const FitResult r = fit_em(sample, c.params, lattice, iter);
      return {r.params, r.converged, c.iterations + r.iterations};
    }
  }
  throw InvalidArgument("unhandled estimator");
}

struct Task {
  std::size_t cell = 0;
  std::size_t sigma = 0;
  int replicate = 0;
};

std::vector<ExperimentRow> run_task(const ExperimentConfig& cfg, const ExperimentCell& cell,
                                    double sigma, const Task& task, kernels::Exec exec) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(task.cell), static_cast<std::uint32_t>(task.sigma),
                    static_cast<std::uint32_t>(task.replicate)};
  Rng rng(seq);

  std::vector<ExperimentRow> rows;
  for (const auto& m : cfg.methods) {
    ExperimentRow row;
    row.p = cell.p;
    row.n = cell.n;
    row.sigma = sigma;
    row.method = m.label();
    row.replicate = task.replicate;
    rows.push_back(row);
  }
  const auto fail_all = [&](const std::string& why) {
    for (auto& r : rows) {
      if (r.status == "ok") r.status = why;
    }
  };

  WnParams truth;
  TorusSample sample;
  try {
    Eigen::MatrixXd corr = Eigen::MatrixXd::Ones(1, 1);
    if (cell.p > 1) corr = random_correlation(CorrelationSpec{cell.p, cfg.cn}, rng).matrix;
    truth = WnParams(Eigen::VectorXd::Zero(cell.p), scale_to_covariance(corr, sigma));
    sample = sample_wn(truth, cell.n, rng);
  } catch (const Error& e) {
    fail_all(std::string("setup: ") + e.what());
    return rows;
  }

  std::optional<WnParams> init;
  std::string init_error;
  try {
    init = initial_params(sample);
  } catch (const Error& e) {
    init_error = std::string("init: ") + e.what();
  }

  const LatticeConfig lattice{cfg.J};
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
    const MethodSpec& m = cfg.methods[k];
    ExperimentRow& row = rows[k];
    if (!m.from_truth && !init) {
      row.status = init_error;
      continue;
    }
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const FitOutcome fit = run_method(m, sample, m.from_truth ? truth : *init, cfg, exec);
      const auto t1 = std::chrono::steady_clock::now();
      row.metrics = evaluate_metrics(sample, fit.params, truth, lattice);
      row.metrics.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
      row.converged = fit.converged;
      row.iterations = fit.iterations;
    } catch (const Error& e) {
      row.status = e.what();
    }
  }
  return rows;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, kernels::Exec exec) {
  config.validate();
  const auto cells = config.cells();
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < config.sigma_list.size(); ++s) {
      for (int r = 0; r < config.replications; ++r) tasks.push_back({c, s, r});
    }
  }

  std::vector<std::vector<ExperimentRow>> slots(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  // Replicates run in parallel; each fit runs its kernels serially inside.
#pragma omp parallel for schedule(dynamic) if (exec == kernels::Exec::parallel)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    slots[static_cast<std::size_t>(t)] =
        run_task(config, cells[task.cell], config.sigma_list[task.sigma], task, kernels::Exec::serial);
  }

  ExperimentReport report;
  report.timing = config.timing;
  for (auto& s : slots) {
    for (auto& row : s) report.rows.push_back(std::move(row));
  }
  return report;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
  out << "p,n,sigma,method,replicate,wilks,angle_sep,scatter_div,runtime_seconds,converged,"
         "iterations,status\n";
  for (const auto& r : report.rows) {
    const bool ok = r.status == "ok";
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '"', '\'');
    out << r.p << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.method << ','
        << r.replicate << ',' << (ok ? format_double(r.metrics.wilks) : "NA") << ','
        << (ok ? format_double(r.metrics.angle_sep) : "NA") << ','
        << (ok ? format_double(r.metrics.scatter_div) : "NA") << ','
        << (ok && report.timing ? format_double(r.metrics.runtime_seconds) : "NA") << ','
        << (r.converged ? "true" : "false") << ',' << r.iterations << ",\"" << status << "\"\n";
  }
}

std::vector<CellSummary> summarize(const ExperimentReport& report) {
  struct Acc {
    CellSummary summary;
    std::vector<double> wilks, as, delta;
  };
  std::vector<Acc> accs;
  for (const auto& r : report.rows) {
    auto it = std::find_if(accs.begin(), accs.end(), [&](const Acc& a) {
      return a.summary.p == r.p && a.summary.n == r.n && a.summary.sigma == r.sigma &&
             a.summary.method == r.method;
    });
    if (it == accs.end()) {
      accs.push_back({CellSummary{r.p, r.n, r.sigma, r.method}, {}, {}, {}});
      it = accs.end() - 1;
    }
    if (r.status != "ok") continue;
    ++it->summary.ok_rows;
    it->wilks.push_back(r.metrics.wilks);
    it->as.push_back(r.metrics.angle_sep);
    it->delta.push_back(r.metrics.scatter_div);
  }
  std::vector<CellSummary> out;
  for (auto& a : accs) {
    a.summary.median_wilks = median(a.wilks);
    a.summary.median_angle_sep = median(a.as);
    a.summary.median_scatter_div = median(a.delta);
    out.push_back(a.summary);
  }
  return out;
}

}  // namespace wntorus
