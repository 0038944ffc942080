#pragma once

#include <functional>
#include <vector>

namespace urllc::numerics {

/// Standard normal CDF.
double normal_cdf(double x);
/// log of the standard normal CDF, accurate far into the lower tail.
double log_normal_cdf(double x);

/// CDF of N(mean, var) at x. A zero variance gives the step 1{x >= mean}.
double gaussian_cdf(double x, double mean, double var);
double log_gaussian_cdf(double x, double mean, double var);

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
double expint_e1(double x);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b].
Quadrature gauss_legendre(int n, double a, double b);
/// n-point Gauss-Laguerre rule for weight e^{-x} on [0, inf).
Quadrature gauss_laguerre(int n);

struct Minimum {
  double x = 0.0;
  double value = 0.0;
};

/// Brent minimization on [lo, hi] to roughly `bits` bits of precision.
Minimum minimize_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           int bits = 40, int max_iter = 200);

/// Scans `points` equally spaced abscissae in [lo, hi], then refines around the best.
Minimum scan_minimize(const std::function<double(double)>& f, double lo, double hi, int points,
                      int bits = 40);

/// Root of a monotone function on [lo, hi] (f(lo) and f(hi) of opposite sign) to
/// relative width `rel_tol`.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol = 1e-12, int max_iter = 200);

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex on an unconstrained objective.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, double step, double tol = 1e-12,
                          int max_iter = 20000);

}  // namespace urllc::numerics
