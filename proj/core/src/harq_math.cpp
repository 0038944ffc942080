#include "urllc/harq_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urllc/numerics.hpp"

namespace urllc {

double initial_gamma(double rate) { return std::exp2(rate) - 1.0; }

double cc_residual_update(double gamma, double sinr) { return std::max(gamma - sinr, 0.0); }

double ir_residual_update(double gamma, double sinr) {
  return std::max((gamma - sinr) / (1.0 + sinr), 0.0);
}

double oma_error_prob(double gamma, double power, double pathloss, double noise) {
  if (gamma <= 0.0) return 0.0;
  if (power <= 0.0) return 1.0;
  return -std::expm1(-gamma * pathloss * noise / power);
}

double power_for_target(double gamma, double eps, double pathloss, double noise) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("power_for_target: eps must lie in (0, 1)");
  if (gamma <= 0.0) return 0.0;
  return -gamma * pathloss * noise / std::log1p(-eps);
}

MiStats mi_round_stats(double s, double t, int blocklength) {
  return {std::log1p(std::max(s, 0.0)), 2.0 * std::clamp(t, 0.0, 1.0) / blocklength};
}

double fbl_outage(double rate, double mu, double var) {
  return numerics::gaussian_cdf(rate * M_LN2, mu, var);
}

double fbl_conditional(double rate, double mu1, double nu1, double mu0, double nu0) {
  const double x = rate * M_LN2;
  const double l1 = numerics::log_gaussian_cdf(x, mu1, nu1);
  const double l0 = numerics::log_gaussian_cdf(x, mu0, nu0);
  if (std::isinf(l0)) return 0.0;
  if (std::isinf(l1)) return 0.0;
  return std::clamp(std::exp(l1 - l0), 0.0, 1.0);
}

double fbl_round_error(double rate, double mu_prev, double nu_prev, const MiStats& add) {
  return fbl_conditional(rate, mu_prev + add.mean, nu_prev + add.var, mu_prev, nu_prev);
}

}  // namespace urllc
