#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "wntorus/circular.hpp"
#include "wntorus/simulate.hpp"

using namespace wntorus;
using json = nlohmann::json;
using oracle::kPi;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_sample(const std::string& path, const Eigen::MatrixXd& x, bool header) {
  std::ofstream f(path);
  f.precision(17);
  if (header) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) f << (c ? "," : "") << "theta" << c;
    f << '\n';
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) f << (c ? "," : "") << x(i, c);
    f << '\n';
  }
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(WNTORUS_BIN) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json fit_json(const cli::FitRequest& req, int expected_code) {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_fit(req, out, err) == expected_code);
  return json::parse(out.str());
}

const WnParams kTruth(Eigen::Vector2d(1.0, 5.5), Eigen::Matrix2d::Identity() * (kPi / 4) * (kPi / 4));

}  // namespace

TEST_CASE("fit em on a simulated fixture produces the documented JSON") {
  write_sample("fixture2.csv", sample_wn(kTruth, 500, 1).angles(), true);
  cli::FitRequest req;
  req.input = "fixture2.csv";
  const json j = fit_json(req, cli::kOk);
  for (const char* key : {"method", "p", "n", "mu", "sigma", "loglik", "iterations", "converged",
                          "reason", "warnings"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["method"] == "em");
  CHECK(j["p"] == 2);
  CHECK(j["n"] == 500);
  REQUIRE(j["mu"].size() == 2);
  REQUIRE(j["sigma"].size() == 2);
  REQUIRE(j["sigma"][0].size() == 2);
  CHECK(j["sigma"][0][1] == j["sigma"][1][0]);
  CHECK(j["converged"] == true);
  CHECK(j["warnings"].empty());
  const Eigen::Vector2d mu(j["mu"][0].get<double>(), j["mu"][1].get<double>());
  Eigen::Matrix2d s;
  s << j["sigma"][0][0].get<double>(), j["sigma"][0][1].get<double>(), j["sigma"][1][0].get<double>(),
      j["sigma"][1][1].get<double>();
  CHECK(angle_separation(mu, kTruth.mu) < 0.01);
  CHECK(scatter_divergence(s, kTruth.sigma) < 0.05);
}

TEST_CASE("fit with every method") {
  write_sample("fixture_small.csv", sample_wn(kTruth, 80, 2).angles(), false);
  for (const char* m : {"em", "cem", "direct", "cem-then-em"}) {
    cli::FitRequest req;
    req.input = "fixture_small.csv";
    req.method = m;
    req.unwrapped_output = std::string("unwrapped_") + m + ".csv";
    const json j = fit_json(req, cli::kOk);
    CHECK(j["method"] == m);
    const bool classified = std::string(m).rfind("cem", 0) == 0;
    CHECK(j.contains("wrapping_coefficients") == classified);
    if (classified) {
      CHECK(j["wrapping_coefficients"].size() == 80);
      CHECK(j["unwrapped_path"] == *req.unwrapped_output);
      const cli::CsvTable t = cli::read_csv(*req.unwrapped_output);
      CHECK(t.values.rows() == 80);
    }
  }
}

TEST_CASE("fit input errors") {
  write_file("empty.csv", "");
  cli::FitRequest req;
  req.input = "empty.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_fit(req, out, err) == cli::kBadInput);
  CHECK(err.str().find("empty.csv") != std::string::npos);

  write_file("header_only.csv", "a,b\n");
  req.input = "header_only.csv";
  std::ostringstream err2;
  CHECK(cli::cmd_fit(req, out, err2) == cli::kBadInput);
  CHECK(err2.str().find("header_only.csv") != std::string::npos);

  write_file("ragged.csv", "1,2\n3\n");
  req.input = "ragged.csv";
  CHECK(cli::cmd_fit(req, out, err) == cli::kBadInput);

  req.input = "does_not_exist.csv";
  CHECK(cli::cmd_fit(req, out, err) == cli::kBadInput);

  req.input = "fixture_small.csv";
  req.method = "newton";
  CHECK(cli::cmd_fit(req, out, err) == cli::kBadInput);
}

TEST_CASE("out-of-range values are wrapped with a warning") {
  Eigen::MatrixXd x = sample_wn(kTruth, 50, 3).angles();
  x(0, 0) = 7.0;
  write_sample("with_seven.csv", x, false);
  cli::FitRequest req;
  req.input = "with_seven.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_fit(req, out, err) == cli::kOk);
  CHECK(err.str().find("warning") != std::string::npos);
  const json j = json::parse(out.str());
  REQUIRE(j["warnings"].size() == 1);

  x(0, 0) = 7.0 - kTwoPi;
  write_sample("without_seven.csv", x, false);
  req.input = "without_seven.csv";
  const json k = fit_json(req, cli::kOk);
  CHECK(j["loglik"].get<double>() == doctest::Approx(k["loglik"].get<double>()).epsilon(1e-12));
}

TEST_CASE("degrees input and mixed estimation") {
  const Eigen::MatrixXd x = sample_wn(kTruth, 100, 4).angles();
  write_sample("radians.csv", x, false);
  write_sample("degrees.csv", x * 180.0 / kPi, false);
  cli::FitRequest req;
  req.input = "radians.csv";
  const json a = fit_json(req, cli::kOk);
  req.input = "degrees.csv";
  req.degrees = true;
  const json b = fit_json(req, cli::kOk);
  CHECK(a["loglik"].get<double>() == doctest::Approx(b["loglik"].get<double>()).epsilon(1e-9));

  Eigen::MatrixXd mixed(100, 3);
  mixed.leftCols(2) = x;
  for (Eigen::Index i = 0; i < 100; ++i) mixed(i, 2) = 10.0 + std::sin(static_cast<double>(i));
  write_sample("mixed.csv", mixed, true);
  cli::FitRequest m;
  m.input = "mixed.csv";
  m.linear_columns = {2};
  const json j = fit_json(m, cli::kOk);
  CHECK(j["p"] == 2);
  REQUIRE(j.contains("linear"));
  CHECK(j["linear"]["sigma12"].size() == 2);
  CHECK(j["linear"]["sigma22"].size() == 1);
  m.method = "direct";
  std::ostringstream out, err;
  CHECK(cli::cmd_fit(m, out, err) == cli::kBadInput);
  m.method = "em";
  m.linear_columns = {5};
  CHECK(cli::cmd_fit(m, out, err) == cli::kBadInput);
}

TEST_CASE("degenerate estimation exits 2") {
  write_file("two_points.csv", "0.5,1.0\n0.5,2.0\n0.5,3.0\n");
  cli::FitRequest req;
  req.input = "two_points.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_fit(req, out, err) == cli::kDegenerate);
}

TEST_CASE("simulate writes the report and summaries") {
  write_file("sim.cfg", "p = 2\nn = 30\nsigma = pi/4\nreps = 2\nmethods = em\nseed = 5\n");
  cli::SimulateRequest req{"sim.cfg", std::string("sim_a.csv")};
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(req, out, err) == cli::kOk);
  const std::string a = read_file("sim_a.csv");
  CHECK(std::count(a.begin(), a.end(), '\n') == 3);
  CHECK(out.str().find("median_as") != std::string::npos);

  req.output = "sim_b.csv";
  REQUIRE(cli::cmd_simulate(req, out, err) == cli::kOk);
  CHECK(read_file("sim_b.csv") == a);

  write_file("bad_method.cfg", "p = 2\nmethods = em, magic\n");
  std::ostringstream err2;
  CHECK(cli::cmd_simulate({"bad_method.cfg", std::nullopt}, out, err2) == cli::kBadInput);
  CHECK(err2.str().find("cem-em") != std::string::npos);

  write_file("direct10.cfg", "p = 10\nn = 20\nmethods = direct\n");
  std::ostringstream err3;
  CHECK(cli::cmd_simulate({"direct10.cfg", std::nullopt}, out, err3) == cli::kBadInput);
  CHECK(err3.str().find("p = 10") != std::string::npos);
}

TEST_CASE("gencor output") {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_gencor(2, 20.0, 1, out, err) == cli::kOk);
  std::istringstream lines(out.str());
  std::string comment, r0, r1;
  std::getline(lines, comment);
  std::getline(lines, r0);
  std::getline(lines, r1);
  CHECK(comment.rfind("# condition_number = ", 0) == 0);
  CHECK(r0.rfind("1,", 0) == 0);
  const double off = std::stod(r0.substr(2));
  CHECK(std::abs(std::abs(off) - 19.0 / 21.0) < 1e-6);
  CHECK(r1.substr(r1.rfind(',') + 1) == "1");

  std::ostringstream out5;
  REQUIRE(cli::cmd_gencor(5, 20.0, 3, out5, err) == cli::kOk);
  const std::string first = out5.str().substr(0, out5.str().find('\n'));
  const double cn = std::stod(first.substr(first.find('=') + 1));
  CHECK(std::abs(cn - 20.0) / 20.0 < 1e-3);

  std::ostringstream bad;
  CHECK(cli::cmd_gencor(1, 20.0, 1, bad, err) == cli::kBadInput);
}

TEST_CASE("binary entry point, exit codes and thread flag") {
  CHECK(run_binary("gencor -p 3 --cn 20 --seed 2") == 0);
  CHECK(read_file("cli_stdout.txt").rfind("# condition_number", 0) == 0);
  CHECK(run_binary("fit empty.csv") == 1);
  CHECK(read_file("cli_stderr.txt").find("empty.csv") != std::string::npos);
  CHECK(run_binary("fit two_points.csv") == 2);
  CHECK(run_binary("fit fixture_small.csv --method cem -J 2") == 0);
  CHECK(json::parse(read_file("cli_stdout.txt"))["method"] == "cem");
  CHECK(run_binary("--threads 1 simulate sim.cfg -o sim_t1.csv") == 0);
  CHECK(run_binary("--threads 3 simulate sim.cfg -o sim_t3.csv") == 0);
  CHECK(read_file("sim_t1.csv") == read_file("sim_t3.csv"));
  CHECK(run_binary("nonsense") != 0);
}

TEST_CASE("thread resolution prefers the flag over the environment") {
  setenv("WNTORUS_THREADS", "3", 1);
  CHECK(cli::resolve_threads(0) == 3);
  CHECK(cli::resolve_threads(2) == 2);
  unsetenv("WNTORUS_THREADS");
  CHECK(cli::resolve_threads(0) >= 1);
}

TEST_CASE("round trip from a simulate-style fixture") {
  const WnParams truth(Eigen::Vector2d(0.0, 0.0),
                       scale_to_covariance(random_correlation({2}, 8).matrix, kPi / 4));
  write_sample("roundtrip.csv", sample_wn(truth, 500, 9).angles(), false);
  cli::FitRequest req;
  req.input = "roundtrip.csv";
  const json j = fit_json(req, cli::kOk);
  const Eigen::Vector2d mu(j["mu"][0].get<double>(), j["mu"][1].get<double>());
  Eigen::Matrix2d s;
  s << j["sigma"][0][0].get<double>(), j["sigma"][0][1].get<double>(), j["sigma"][1][0].get<double>(),
      j["sigma"][1][1].get<double>();
  CHECK(angle_separation(mu, truth.mu) < 0.01);
  CHECK(scatter_divergence(s, truth.sigma) < 0.05);
}
