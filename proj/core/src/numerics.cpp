#include "urllc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace urllc::numerics {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Quadrature golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const auto n = diag.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jacobi(i, i) = diag(i);
    if (i + 1 < n) jacobi(i, i + 1) = jacobi(i + 1, i) = off(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    q.weights[i] = mu0 * v * v;
  }
  return q;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_normal_cdf(double x) {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  if (x > -37.0) return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  // Mills ratio asymptotic series: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6).
  const double z2 = 1.0 / (x * x);
  const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * M_PI) + std::log(series);
}

double gaussian_cdf(double x, double mean, double var) {
  if (var <= 0.0) return x >= mean ? 1.0 : 0.0;
  return normal_cdf((x - mean) / std::sqrt(var));
}

double log_gaussian_cdf(double x, double mean, double var) {
  if (var <= 0.0) return x >= mean ? 0.0 : -std::numeric_limits<double>::infinity();
  return log_normal_cdf((x - mean) / std::sqrt(var));
}

double expint_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1 requires x > 0");
  return boost::math::expint(1, x);
}

Quadrature gauss_legendre(int n, double a, double b) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Quadrature q = golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

Quadrature gauss_laguerre(int n) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = k;
  return golub_welsch(diag, off, 1.0);
}

Minimum minimize_bracketed(const std::function<double(double)>& f, double lo, double hi, int bits,
                           int max_iter) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
  return {r.first, r.second};
}

Minimum scan_minimize(const std::function<double(double)>& f, double lo, double hi, int points,
                      int bits) {
  points = std::max(points, 3);
  const double h = (hi - lo) / (points - 1);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double v = f(lo + h * i);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + h * std::max(best - 1, 0);
  const double b = lo + h * std::min(best + 1, points - 1);
  Minimum m = minimize_bracketed(f, a, b, bits);
  if (m.value > best_v) return {lo + h * best, best_v};
  return m;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                   int max_iter) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto tol = [rel_tol](double a, double b) {
    return std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  const auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, double step, double tol, int max_iter) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  SimplexResult out;
  std::vector<std::size_t> order(n + 1);
  auto along = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = c[k] + t * (p[k] - c[k]);
    return r;
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    const double spread = std::abs(vals[worst] - vals[best]);
    if (spread <= tol * (std::abs(vals[best]) + tol)) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;

    auto refl = along(centroid, pts[worst], -1.0);
    const double fr = f(refl);
    if (fr < vals[best]) {
      auto exp = along(centroid, pts[worst], -2.0);
      const double fe = f(exp);
      if (fe < fr) {
        pts[worst] = std::move(exp);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(refl);
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = std::move(refl);
      vals[worst] = fr;
    } else {
      auto con = fr < vals[worst] ? along(centroid, pts[worst], -0.5) : along(centroid, pts[worst], 0.5);
      const double fc = f(con);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = std::move(con);
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = along(pts[best], pts[i], 0.5);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  out.x = pts[best];
  out.value = vals[best];
  out.iterations = it;
  return out;
}

}  // namespace urllc::numerics
