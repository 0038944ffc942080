#include <gtest/gtest.h>

#include <cmath>

#include "urllc/numerics.hpp"

using namespace urllc::numerics;

TEST(Numerics, NormalCdfAgainstErfc) {
  for (double x : {-5.0, -1.7329, 0.0, 0.3, 4.0})
    EXPECT_NEAR(normal_cdf(x), 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(normal_cdf(-1.7329), 0.0416, 1e-4);
}

TEST(Numerics, LogCdfDeepTail) {
  for (double x : {-3.0, -10.0, -20.0, -30.0})
    EXPECT_NEAR(log_normal_cdf(x), std::log(0.5 * std::erfc(-x / std::sqrt(2.0))), 1e-10 * std::abs(x * x));
  // Mills-ratio asymptote far beyond double range of the CDF itself.
  const double x = -100.0;
  const double approx = -0.5 * x * x - std::log(-x) - 0.5 * std::log(2 * M_PI) + std::log1p(-1.0 / (x * x));
  EXPECT_NEAR(log_normal_cdf(x), approx, 1e-6);
  EXPECT_EQ(gaussian_cdf(1.0, 2.0, 0.0), 0.0);
  EXPECT_EQ(gaussian_cdf(2.0, 2.0, 0.0), 1.0);
}

TEST(Numerics, ExpintAgainstStd) {
  for (double x : {1e-6, 0.1, 1.0, 5.0}) EXPECT_NEAR(expint_e1(x), -std::expint(-x), 1e-12 * -std::expint(-x));
}

TEST(Numerics, Quadratures) {
  const auto gl = gauss_legendre(20, 0.0, 2.0);
  double s = 0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::exp(gl.nodes[i]);
  EXPECT_NEAR(s, std::exp(2.0) - 1.0, 1e-13);
  const auto lg = gauss_laguerre(64);
  s = 0;
  for (std::size_t i = 0; i < lg.nodes.size(); ++i) s += lg.weights[i] * lg.nodes[i] * lg.nodes[i];
  EXPECT_NEAR(s, 2.0, 1e-10);
}

TEST(Numerics, Minimizers) {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3) + 1.0; };
  EXPECT_NEAR(minimize_bracketed(f, -1, 2).x, 0.3, 1e-7);
  auto g = [](double x) { return std::cos(3 * x) + 0.1 * x; };
  const auto m = scan_minimize(g, 0.0, 6.0, 60);
  EXPECT_NEAR(m.value, std::min({g(M_PI / 3 - 0.0111), g(M_PI - 0.0111), g(5 * M_PI / 3 - 0.0111)}), 1e-4);
  EXPECT_NEAR(bisect_root([](double x) { return x * x - 2; }, 0, 2), std::sqrt(2.0), 1e-11);
  const auto nm = nelder_mead([](const std::vector<double>& v) { return std::pow(v[0] - 1, 2) + 4 * std::pow(v[1] + 2, 2); },
                              {0.0, 0.0}, 0.5);
  EXPECT_NEAR(nm.x[0], 1.0, 1e-5);
  EXPECT_NEAR(nm.x[1], -2.0, 1e-5);
}
