#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wntorus/circular.hpp"
#include "wntorus/error.hpp"
#include "wntorus/linalg.hpp"
#include "wntorus/model.hpp"
#include "wntorus/simulate.hpp"

using namespace wntorus;
using oracle::kPi;

namespace {

std::vector<double> column(const TorusSample& s, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(s.n()));
  for (Eigen::Index i = 0; i < s.n(); ++i) v[static_cast<std::size_t>(i)] = s.angles()(i, r);
  return v;
}

}  // namespace

TEST_CASE("sample_wn range, reproducibility and moments") {
  const WnParams t(Eigen::Vector3d(0.1, 3.0, 6.2), Eigen::Matrix3d::Identity() * 4.0);
  const TorusSample s = sample_wn(t, 2000, 1);
  CHECK(s.angles().minCoeff() >= 0.0);
  CHECK(s.angles().maxCoeff() < kTwoPi);
  CHECK(sample_wn(t, 2000, 1).angles() == s.angles());
  CHECK(sample_wn(t, 2000, 2).angles() != s.angles());

  const Eigen::Vector2d mu(1.0, 5.0);
  const WnParams tight(mu, Eigen::Matrix2d::Identity() * (kPi / 64) * (kPi / 64));
  const TorusSample st = sample_wn(tight, 10000, 3);
  for (int r = 0; r < 2; ++r) {
    CHECK(std::abs(oracle::angle_diff(circular_mean(column(st, r)).radians(), mu[r])) < 0.05);
  }

  const WnParams one(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, kPi * kPi / 16));
  const TorusSample s1 = sample_wn(one, 100000, 4);
  CHECK(std::abs(mean_resultant_length(column(s1, 0)) - std::exp(-kPi * kPi / 32)) < 0.01);
}

TEST_CASE("sample_wn matches an independent generator in distribution") {
  // same construction from another stream: compare second-order circular moments
  Eigen::Matrix2d s;
  s << 0.5, 0.3, 0.3, 0.8;
  const Eigen::Vector2d mu(2.0, 4.0);
  const TorusSample a = sample_wn(WnParams(mu, s), 50000, 5);
  const TorusSample b(oracle::wrapped_normal_draws(mu, s, 50000, 6));
  CHECK(std::abs(circular_correlation(column(a, 0), column(a, 1)) -
                 circular_correlation(column(b, 0), column(b, 1))) < 0.02);
  CHECK(std::abs(mean_resultant_length(column(a, 1)) - std::exp(-0.4)) < 0.01);
}

TEST_CASE("random_correlation for p = 2 has the closed form off-diagonal") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CorrelationResult r = random_correlation({2, 20.0}, seed);
    CHECK(std::abs(std::abs(r.matrix(0, 1)) - 19.0 / 21.0) < 1e-6);
    CHECK(r.matrix(0, 0) == 1.0);
    CHECK(r.matrix(1, 1) == 1.0);
  }
}

TEST_CASE("random_correlation invariants") {
  for (int p : {3, 5, 10}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CorrelationResult r = random_correlation({p, 20.0}, seed);
      CHECK((r.matrix - r.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((r.matrix.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.matrix);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      const double cn = linalg::condition_number(r.matrix);
      CHECK(cn >= 20.0 / (1.0 + 1e-3));
      CHECK(cn <= 20.0 * (1.0 + 1e-3));
      CHECK(r.condition_number == doctest::Approx(cn).epsilon(1e-9));
    }
  }
  CHECK(random_correlation({5, 20.0}, 7).matrix == random_correlation({5, 20.0}, 7).matrix);
}

TEST_CASE("random_correlation validation and round cap") {
  CHECK_THROWS_AS(random_correlation({1, 20.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(random_correlation({3, 1.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(random_correlation({3, 20.0, 0.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(random_correlation({8, 20.0, 1e-15, 1}, 1), ConvergenceFailure);
}

TEST_CASE("scale_to_covariance") {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(scale_to_covariance(i2, kPi / 4) == i2 * (kPi / 4) * (kPi / 4));
  const CorrelationResult r = random_correlation({4, 20.0}, 3);
  const Eigen::MatrixXd s = scale_to_covariance(r.matrix, 1.7);
  CHECK((s.diagonal().array() - 1.7 * 1.7).abs().maxCoeff() < 1e-12);
  CHECK(linalg::condition_number(s) == doctest::Approx(linalg::condition_number(r.matrix)).epsilon(1e-10));
}

TEST_CASE("wilks_lambda") {
  const WnParams t(Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Constant(1, 1, 0.3));
  const TorusSample s = sample_wn(t, 100, 8);
  CHECK(wilks_lambda(s, t, t, {3}) == 0.0);
  const WnParams bad(Eigen::VectorXd::Constant(1, 5.0), Eigen::MatrixXd::Constant(1, 1, 3.0));
  CHECK(wilks_lambda(s, bad, t, {3}) < 0.0);

  std::vector<double> y(s.angles().data(), s.angles().data() + s.n());
  const oracle::GridMle g = oracle::grid_mle_1d(y, circular_mean(y).radians());
  const WnParams mle(Eigen::VectorXd::Constant(1, g.mu), Eigen::MatrixXd::Constant(1, 1, g.sd * g.sd));
  CHECK(wilks_lambda(s, mle, t, {10}) >= 0.0);
}

TEST_CASE("scatter_divergence") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, 0.7);
  CHECK(std::abs(scatter_divergence(a, a)) < 1e-10);
  CHECK(scatter_divergence(2.0 * a, a) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));

  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Eigen::MatrixXd s0 = oracle::random_spd(3, rng);
    const Eigen::MatrixXd sh = oracle::random_spd(3, rng, 0.5);
    // eigenvalue form: sum(g - log g - 1) over eigenvalues of S0^-1/2 Sh S0^-1/2
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sh, s0);
    double want = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double g = es.eigenvalues()[i];
      want += g - std::log(g) - 1.0;
    }
    const double d = scatter_divergence(sh, s0);
    CHECK(d == doctest::Approx(want).epsilon(1e-9));
    CHECK(d > 0.0);
    CHECK(std::abs(scatter_divergence(s0, s0)) < 1e-10);
  }
  CHECK_THROWS(scatter_divergence(-a, a));
}

TEST_CASE("evaluate_metrics bundles the three measures") {
  const WnParams t(Eigen::Vector2d(1.0, 2.0), Eigen::Matrix2d::Identity() * 0.3);
  const WnParams e(Eigen::Vector2d(1.1, 1.9), Eigen::Matrix2d::Identity() * 0.35);
  const TorusSample s = sample_wn(t, 50, 10);
  const MetricsReport m = evaluate_metrics(s, e, t, {3});
  CHECK(m.wilks == wilks_lambda(s, e, t, {3}));
  CHECK(m.angle_sep == angle_separation(e.mu, t.mu));
  CHECK(m.scatter_div == scatter_divergence(e.sigma, t.sigma));
}
