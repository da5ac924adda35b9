#include "wntorus/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wntorus::optimize {

namespace {

class Counted {
 public:
  Counted(const Objective& f, int budget) : f_(f), budget_(budget) {}

  double operator()(const Eigen::VectorXd& x) {
    ++evals_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  bool exhausted() const { return evals_ >= budget_; }
  int evals() const { return evals_; }

 private:
  const Objective& f_;
  int budget_;
  int evals_ = 0;
};

struct SimplexOutcome {
  bool converged = false;
};

// One simplex run seeded at best_x; updates best_x/best_f in place.
SimplexOutcome run_simplex(Counted& f, Eigen::VectorXd& best_x, double& best_f, const Options& opts,
                           Result& res) {
  const Eigen::Index dim = best_x.size();
  const auto m = static_cast<std::size_t>(dim + 1);
  std::vector<Eigen::VectorXd> v(m, best_x);
  std::vector<double> fv(m, best_f);
  for (Eigen::Index k = 0; k < dim; ++k) {
    auto& vk = v[static_cast<std::size_t>(k + 1)];
    vk[k] += opts.initial_step;
    fv[static_cast<std::size_t>(k + 1)] = f(vk);
  }
  std::vector<std::size_t> order(m);

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t lo = order.front();
    const std::size_t hi = order.back();
    const std::size_t second = order[m - 2];
    best_x = v[lo];
    best_f = fv[lo];

    double diameter = 0.0;
    for (std::size_t i = 0; i < m; ++i) diameter = std::max(diameter, (v[i] - v[lo]).cwiseAbs().maxCoeff());
    const double spread = fv[hi] - fv[lo];
    if (spread <= opts.f_tol * (std::abs(fv[lo]) + opts.f_tol) && diameter <= opts.x_tol) {
      return {true};
    }
    if (f.exhausted()) return {false};

    ++res.iterations;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < m; ++i) {
      if (i != hi) centroid += v[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd xr = centroid + (centroid - v[hi]);
    const double fr = f(xr);
    if (fr < fv[lo]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - v[hi]);
      const double fe = f(xe);
      if (fe < fr) {
        v[hi] = xe;
        fv[hi] = fe;
      } else {
        v[hi] = xr;
        fv[hi] = fr;
      }
    } else if (fr < fv[second]) {
      v[hi] = xr;
      fv[hi] = fr;
    } else {
      const bool outside = fr < fv[hi];
      const Eigen::VectorXd xc =
          outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (v[hi] - centroid));
      const double fc = f(xc);
      if (fc < std::min(fr, fv[hi])) {
        v[hi] = xc;
        fv[hi] = fc;
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          if (i == lo) continue;
          v[i] = v[lo] + 0.5 * (v[i] - v[lo]);
          fv[i] = f(v[i]);
        }
      }
    }
    res.trace.push_back(*std::min_element(fv.begin(), fv.end()));
  }
}

}  // namespace

Result nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const Options& opts) {
  Counted f(objective, opts.max_evals);
  Result res;
  Eigen::VectorXd best_x = x0;
  double best_f = f(x0);
  res.trace.push_back(best_f);
  for (int restart = 0;; ++restart) {
    const double before = best_f;
    if (!run_simplex(f, best_x, best_f, opts, res).converged) break;
    const bool improved = before - best_f > opts.f_tol * (std::abs(before) + opts.f_tol);
    if ((restart > 0 && !improved) || restart == 10) {
      res.converged = true;
      break;
    }
  }
  res.x = best_x;
  res.f = best_f;
  res.evaluations = f.evals();
  return res;
}

Result bfgs_numeric(const Objective& objective, const Eigen::VectorXd& x0, const Options& opts) {
  Counted f(objective, opts.max_evals);
  const Eigen::Index dim = x0.size();
  const double h_base = std::cbrt(std::numeric_limits<double>::epsilon());

  const auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(dim);
    Eigen::VectorXd xp = x;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double h = h_base * std::max(1.0, std::abs(x[k]));
      xp[k] = x[k] + h;
      const double fp = f(xp);
      xp[k] = x[k] - h;
      const double fm = f(xp);
      xp[k] = x[k];
      g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  Result res;
  Eigen::VectorXd x = x0;
  double fx = f(x);
  res.trace.push_back(fx);
  Eigen::VectorXd g = gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);

  while (!f.exhausted()) {
    if (!g.allFinite()) break;
    if (g.cwiseAbs().maxCoeff() <= opts.x_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    if (g.dot(dir) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    const double slope = g.dot(dir);
    Eigen::VectorXd xn;
    double fn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (!f.exhausted() && step * dir.cwiseAbs().maxCoeff() > 1e-16) {
      xn = x + step * dir;
      fn = f(xn);
      if (fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) {
      res.converged = true;  // no descent possible at gradient resolution
      break;
    }
    const Eigen::VectorXd gn = gradient(xn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = gn - g;
    const double sy = s.dot(yv);
    const double fchange = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    res.trace.push_back(fx);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(dim, dim);
      hinv = (i - rho * s * yv.transpose()) * hinv * (i - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    if (fchange <= opts.f_tol * (std::abs(fx) + opts.f_tol) && s.cwiseAbs().maxCoeff() <= opts.x_tol) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.f = fx;
  res.evaluations = f.evals();
  return res;
}

}  // namespace wntorus::optimize
