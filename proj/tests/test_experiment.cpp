#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <omp.h>

#include "doctest.h"
#include "oracles.hpp"
#include "wntorus/error.hpp"
#include "wntorus/experiment.hpp"

using namespace wntorus;
using oracle::kPi;

namespace {

std::string csv(const ExperimentReport& r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

double median_for(const std::vector<CellSummary>& s, const std::string& method, int n) {
  for (const auto& c : s) {
    if (c.method == method && c.n == n) return c.median_angle_sep;
  }
  FAIL("missing cell");
  return NAN;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_method("em") == MethodSpec{Estimator::em, false});
  CHECK(parse_method("cemT") == MethodSpec{Estimator::cem, true});
  CHECK(parse_method("cem-em") == MethodSpec{Estimator::cem_then_em, false});
  CHECK(parse_method("directT").label() == "directT");
  try {
    (void)parse_method("newton");
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    for (const char* m : {"em", "cem", "direct", "cem-em"}) CHECK(msg.find(m) != std::string::npos);
  }
}

TEST_CASE("sigma tokens") {
  CHECK(parse_sigma("pi/8") == kPi / 8);
  CHECK(parse_sigma("pi/4") == kPi / 4);
  CHECK(parse_sigma("pi/2") == kPi / 2);
  CHECK(parse_sigma("pi") == kPi);
  CHECK(parse_sigma("3pi/2") == 1.5 * kPi);
  CHECK(parse_sigma("3/2pi") == 1.5 * kPi);
  CHECK(parse_sigma("2pi") == 2 * kPi);
  CHECK(parse_sigma("0.25") == 0.25);
  CHECK_THROWS(parse_sigma("-1"));
  CHECK_THROWS(parse_sigma("tau"));
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# a comment\n"
      "pairs = 2x100, 5x50\n"
      "sigma = pi/8, pi/4\n"
      "reps = 3\n"
      "cn = 10\n"
      "methods = em, cemT\n"
      "J = 2\n"
      "seed = 17\n"
      "max_iter = 50\n"
      "tol = 1e-6\n"
      "timing = false\n");
  const ExperimentConfig c = parse_experiment_config(in);
  REQUIRE(c.cells().size() == 2);
  CHECK(c.cells()[1].p == 5);
  CHECK(c.cells()[1].n == 50);
  CHECK(c.sigma_list == std::vector<double>{kPi / 8, kPi / 4});
  CHECK(c.replications == 3);
  CHECK(c.cn == 10.0);
  CHECK(c.methods.size() == 2);
  CHECK(c.J == 2);
  CHECK(c.seed == 17);
  CHECK(c.iter.max_iter == 50);
  CHECK(c.iter.tol == 1e-6);

  std::istringstream grid("p = 1, 2\nn = 10, 20, 30\n");
  CHECK(parse_experiment_config(grid).cells().size() == 6);

  std::istringstream bad("colour = red\n");
  CHECK_THROWS_AS(parse_experiment_config(bad), InvalidArgument);
  std::istringstream bad_method("methods = em, magic\n");
  CHECK_THROWS_AS(parse_experiment_config(bad_method), InvalidArgument);
}

TEST_CASE("validation guards direct at high dimension") {
  ExperimentConfig c;
  c.pairs = {{10, 50}};
  c.methods = {parse_method("direct")};
  CHECK_THROWS_AS(c.validate(), DimensionGuard);
  c.methods = {parse_method("em")};
  CHECK_THROWS_AS(c.validate(), LatticeTooLarge);
  c.J = 1;
  CHECK_NOTHROW(c.validate());
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("one row per replicate and method") {
  ExperimentConfig c;
  c.pairs = {{2, 30}};
  c.replications = 2;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.rows.size() == 2);
  c.methods = {parse_method("em"), parse_method("cem"), parse_method("emT"), parse_method("cem-em")};
  const ExperimentReport r2 = run_experiment(c);
  CHECK(r2.rows.size() == 8);
  for (const auto& row : r2.rows) {
    CHECK(row.status == "ok");
    CHECK(row.metrics.angle_sep >= 0.0);
    CHECK(row.metrics.angle_sep <= 2.0 * row.p);
    CHECK(row.metrics.scatter_div >= -1e-10);
  }
  const std::string text = csv(r2);
  CHECK(text.rfind("p,n,sigma,method,replicate,wilks,angle_sep,scatter_div,runtime_seconds,converged,"
                   "iterations,status\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  ExperimentConfig c;
  c.pairs = {{1, 40}, {2, 40}};
  c.sigma_list = {kPi / 8, kPi};
  c.replications = 3;
  c.methods = {parse_method("em"), parse_method("cem"), parse_method("direct")};
  const std::string serial = csv(run_experiment(c, kernels::Exec::serial));
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 5}) {
    omp_set_num_threads(threads);
    CHECK(csv(run_experiment(c)) == serial);
  }
  omp_set_num_threads(saved);
  c.seed = 2;
  CHECK(csv(run_experiment(c)) != serial);
}

TEST_CASE("failures are recorded per row") {
  ExperimentConfig c;
  c.pairs = {{1, 2}};
  c.sigma_list = {1e-9};
  c.replications = 3;
  c.methods = {parse_method("cem"), parse_method("emT")};
  const ExperimentReport r = run_experiment(c);
  CHECK(r.rows.size() == 6);
  const std::string text = csv(r);
  CHECK(text.find("NA") != std::string::npos);
}

TEST_CASE("timing column is NA unless requested") {
  ExperimentConfig c;
  c.pairs = {{1, 20}};
  CHECK(csv(run_experiment(c)).find(",NA,") != std::string::npos);
  c.timing = true;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.rows[0].metrics.runtime_seconds >= 0.0);
  CHECK(csv(r).find(",NA,") == std::string::npos);
}

TEST_CASE("consistency ordering and truth-start agreement") {
  ExperimentConfig c;
  c.pairs = {{1, 50}, {1, 500}};
  c.sigma_list = {kPi / 8};
  c.replications = 100;
  c.methods = {parse_method("em"), parse_method("emT")};
  const auto s = summarize(run_experiment(c));
  CHECK(median_for(s, "em", 500) < median_for(s, "em", 50));

  const ExperimentReport r = run_experiment(c);
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < r.rows.size(); i += 2) {
    REQUIRE(r.rows[i].method == "em");
    REQUIRE(r.rows[i + 1].method == "emT");
    diffs.push_back(std::abs(r.rows[i].metrics.wilks - r.rows[i + 1].metrics.wilks));
  }
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
  CHECK(diffs[diffs.size() / 2] < 1.0);
}
