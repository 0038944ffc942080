#include "urllc/noma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "urllc/harq_math.hpp"
#include "urllc/numerics.hpp"

namespace urllc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-6;

// Shared-slot outage of user a along the ray s_b = t * s_a, written as a function of
// u = noise / s_a. It rises monotonically from the noise-free joint-failure floor.
struct Ray {
  double x, y, c, floor, rate_y, kappa;

  Ray(double t, double phi_a, double phi_b) {
    const double pp = phi_a * phi_b;
    x = 1.0 / (t * phi_b + 1.0);
    y = t / (phi_a + t);
    rate_y = 1.0 + (phi_a + 1.0) / t;
    if (pp < 1.0) {
      c = t * (pp - 1.0) / ((1.0 + t * phi_b) * (phi_a + t));  // 1 - x - y, negative here
      floor = 0.0;
      kappa = ((phi_a + 1.0) / t + (phi_b + 1.0)) / (1.0 - pp);
    } else {
      c = 0.0;
      floor = t * (pp - 1.0) / ((1.0 + t * phi_b) * (phi_a + t));
      kappa = 0.0;
    }
  }

  double operator()(double u) const {
    double p = floor - x * std::expm1(-u) - y * std::expm1(-u * rate_y);
    if (c != 0.0) p -= c * std::expm1(-u * kappa);
    return p;
  }
};

// Largest u (smallest scale) keeping the ray outage at or below eps.
double max_load(const Ray& r, double eps) {
  if (r.floor >= eps) return 0.0;
  double hi = -std::log1p(-eps);
  if (r(hi) <= eps) return hi;
  std::uintmax_t iters = 200;
  auto f = [&](double u) { return r(u) - eps; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(a, b); };
  const auto root = boost::math::tools::toms748_solve(f, 0.0, hi, -eps + r.floor, r(hi) - eps, tol, iters);
  return root.first;
}

PairPowerSolution single_user(const PairUser& a, const PairUser& b, double noise, bool a_is_first) {
  PairPowerSolution s;
  const double pa = a.gamma > 0.0 && a.target < 1.0 ? power_for_target(a.gamma, a.target, a.pathloss, noise) : 0.0;
  s.power_a = a_is_first ? pa : 0.0;
  s.power_b = a_is_first ? 0.0 : pa;
  const double ea = a.gamma > 0.0 ? std::min(a.target, 1.0) : 0.0;
  const double eb = b.gamma > 0.0 ? 1.0 : 0.0;
  s.predicted_eps_a = a_is_first ? ea : eb;
  s.predicted_eps_b = a_is_first ? eb : ea;
  s.feasible = true;
  s.extra_cost = 0.0;
  return s;
}

}  // namespace

double pair_error_closed_form(const PairGeometry& g) {
  if (g.s_a <= 0.0) return 1.0;
  const double ea = std::exp(-g.noise / g.s_a);
  if (g.s_b <= 0.0) return 1.0 - ea;
  const double x = g.s_a / (g.s_b * g.phi_b + g.s_a);
  const double y = g.s_b / (g.s_a * g.phi_a + g.s_b);
  const double a = 1.0 - (x + y * std::exp(-g.noise * (g.phi_a + 1.0) / g.s_b)) * ea;
  const double pp = g.phi_a * g.phi_b;
  if (pp >= 1.0) return std::clamp(a, 0.0, 1.0);
  const double corr =
      (1.0 - x - y) * std::exp(-g.noise / (1.0 - pp) * ((g.phi_a + 1.0) / g.s_b + (g.phi_b + 1.0) / g.s_a));
  return std::clamp(a - corr, 0.0, 1.0);
}

double interference_reduction(std::span<const double> prior_sinrs) {
  double total = 0.0;
  for (double s : prior_sinrs) total += s;
  return 1.0 / (1.0 + total);
}

PairPowerSolution joint_power_min(const PairUser& a, const PairUser& b, double noise) {
  const bool a_silent = a.gamma <= 0.0 || a.target >= 1.0;
  const bool b_silent = b.gamma <= 0.0 || b.target >= 1.0;
  if (b_silent) return single_user(a, b, noise, true);
  if (a_silent) return single_user(b, a, noise, false);

  const double phi_a = a.gamma * a.zeta, phi_b = b.gamma * b.zeta;
  const double w_a = a.gamma * a.pathloss, w_b = b.gamma * b.pathloss;

  // Normalized cost of the ray t = s_b / s_a: (w_a + w_b t) / u with u the largest
  // admissible 1/s_a for both users.
  auto cost = [&](double log_t) {
    const double t = std::exp(log_t);
    const Ray ra(t, phi_a, phi_b);
    const Ray rb(1.0 / t, phi_b, phi_a);
    const double u = std::min(max_load(ra, a.target), max_load(rb, b.target) * t);
    if (u <= 0.0) return kInf;
    return (w_a + w_b * t) / u;
  };

  // Region boundaries in log t: equal normalized received power, plus the edges of
  // the band where the noise-free joint-failure floor already exceeds a target.
  const double center = std::log(a.gamma / b.gamma);
  std::vector<double> cuts{center - 30.0, center, center + 30.0};
  const double pp = phi_a * phi_b;
  if (pp >= 1.0) {
    const double eps = std::min(a.target, b.target);
    const double qa = eps * phi_b, qb = eps * pp + eps - (pp - 1.0), qc = eps * phi_a;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0 && qb < 0.0) {
      const double r1 = (-qb - std::sqrt(disc)) / (2.0 * qa);
      const double r2 = qc / (qa * r1);
      for (double r : {r1, r2})
        if (r > 0.0) cuts.push_back(std::log(r));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double c) { return c < center - 30.0 || c > center + 30.0; }),
             cuts.end());

  constexpr int kScan = 12;
  double best_x = 0.0, best_v = kInf;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo < 1e-12) continue;
    const double h = (hi - lo) / (kScan + 1);
    int arg = -1;
    double v_best = kInf;
    for (int i = 1; i <= kScan; ++i) {
      const double v = cost(lo + h * i);
      if (v < v_best) {
        v_best = v;
        arg = i;
      }
    }
    if (arg < 0) continue;
    const auto m = numerics::minimize_bracketed(cost, lo + h * (arg - 1), lo + h * (arg + 1), 24, 60);
    double x = lo + h * arg, v = v_best;
    if (m.value < v) {
      x = m.x;
      v = m.value;
    }
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }

  PairPowerSolution sol;
  const double oma = power_for_target(a.gamma, a.target, a.pathloss, noise) +
                     power_for_target(b.gamma, b.target, b.pathloss, noise);
  if (!std::isfinite(best_v)) {
    sol.feasible = false;
    return sol;
  }
  const double t = std::exp(best_x);
  const Ray ra(t, phi_a, phi_b);
  const Ray rb(1.0 / t, phi_b, phi_a);
  const double u = std::min(max_load(ra, a.target), max_load(rb, b.target) * t) * (1.0 - 1e-10);
  const double s_a = 1.0 / u, s_b = t / u;  // in units of noise
  sol.power_a = s_a * a.gamma * a.pathloss * noise;
  sol.power_b = s_b * b.gamma * b.pathloss * noise;
  sol.predicted_eps_a = pair_error_closed_form({s_a, s_b, phi_a, phi_b, 1.0});
  sol.predicted_eps_b = pair_error_closed_form({s_b, s_a, phi_b, phi_a, 1.0});
  sol.feasible = sol.predicted_eps_a <= a.target * (1.0 + kSlack) &&
                 sol.predicted_eps_b <= b.target * (1.0 + kSlack) && std::isfinite(sol.power_a) &&
                 std::isfinite(sol.power_b);
  sol.extra_cost = sol.power_a + sol.power_b - oma;
  return sol;
}

std::pair<double, double> fbl_pair_errors(double q_a, double q_b, double rate, int blocklength,
                                          double mu_a, double nu_a, double mu_b, double nu_b) {
  const double k = blocklength;
  const double p_a =
      fbl_conditional(rate, mu_a + std::log1p(q_a / (q_b + 1.0)), nu_a + 2.0 * q_a / (k * (q_a + q_b + 1.0)),
                      mu_a, nu_a);
  const double clean =
      fbl_conditional(rate, mu_b + std::log1p(q_b), nu_b + 2.0 * q_b / (k * (q_b + 1.0)), mu_b, nu_b);
  const double dirty =
      fbl_conditional(rate, mu_b + std::log1p(q_b / (q_a + 1.0)), nu_b + 2.0 * q_b / (k * (q_a + q_b + 1.0)),
                      mu_b, nu_b);
  return {p_a, (1.0 - p_a) * clean + p_a * dirty};
}

namespace {

// Failure probabilities (first, second) of a pair decoded strong-first along
// q_second = t * q_first with scale q_first = lambda.
struct FblRay {
  const FblUser& first;
  const FblUser& second;
  double rate;
  int k;
  double t;

  std::pair<double, double> at(double lambda) const {
    return fbl_pair_errors(lambda, t * lambda, rate, k, first.mu, first.nu, second.mu, second.nu);
  }
};

constexpr double kLogLambdaMax = 40.0;  // received SNR up to e^40

// Smallest lambda meeting one user's constraint; +inf when unreachable.
template <typename F>
double min_scale(F&& err, double eps) {
  if (err(std::exp(kLogLambdaMax)) > eps) return kInf;
  double lo = -40.0, hi = kLogLambdaMax;
  if (err(std::exp(lo)) <= eps) return std::exp(lo);
  for (int i = 0; i < 100 && hi - lo > 1e-11; ++i) {
    const double mid = 0.5 * (lo + hi);
    (err(std::exp(mid)) <= eps ? hi : lo) = mid;
  }
  return std::exp(hi);
}

}  // namespace

PairPowerSolution fbl_joint_power_min(const FblUser& a, const FblUser& b, double rate, int blocklength,
                                      double noise) {
  PairPowerSolution sol;
  const bool a_silent = a.oma_target >= 1.0 || a.oma_power <= 0.0;
  const bool b_silent = b.oma_target >= 1.0 || b.oma_power <= 0.0;
  if (a_silent || b_silent) {
    sol.power_a = a_silent ? 0.0 : a.oma_power;
    sol.power_b = b_silent ? 0.0 : b.oma_power;
    sol.predicted_eps_a = a_silent ? fbl_conditional(rate, a.mu, a.nu, a.mu, a.nu) : a.oma_target;
    sol.predicted_eps_b = b_silent ? fbl_conditional(rate, b.mu, b.nu, b.mu, b.nu) : b.oma_target;
    sol.feasible = true;
    return sol;
  }

  // Power per unit of normalized received power.
  const double c_a = a.pathloss * noise / a.gain, c_b = b.pathloss * noise / b.gain;
  struct Best {
    double cost = kInf, lambda = 0.0, t = 0.0;
  };

  auto solve_order = [&](const FblUser& first, const FblUser& second, double c_first, double c_second) {
    auto cost = [&](double log_t) {
      const FblRay ray{first, second, rate, blocklength, std::exp(log_t)};
      const double l1 = min_scale([&](double l) { return ray.at(l).first; }, first.oma_target);
      if (!std::isfinite(l1)) return kInf;
      const double l2 = min_scale([&](double l) { return ray.at(l).second; }, second.oma_target);
      if (!std::isfinite(l2)) return kInf;
      return (c_first + c_second * ray.t) * std::max(l1, l2);
    };
    // Second user's received power never exceeds the first's: t in (0, 1].
    constexpr int kScan = 24;
    const double lo = -25.0, hi = 0.0, h = (hi - lo) / kScan;
    int arg = -1;
    double v_best = kInf;
    for (int i = 0; i <= kScan; ++i) {
      const double v = cost(lo + h * i);
      if (v < v_best) {
        v_best = v;
        arg = i;
      }
    }
    Best best;
    if (arg < 0) return best;
    double x = lo + h * arg;
    const auto m = numerics::minimize_bracketed(cost, lo + h * std::max(arg - 1, 0),
                                                lo + h * std::min(arg + 1, kScan), 30, 60);
    if (m.value < v_best) {
      x = m.x;
      v_best = m.value;
    }
    const FblRay ray{first, second, rate, blocklength, std::exp(x)};
    best.cost = v_best;
    best.t = ray.t;
    best.lambda = std::max(min_scale([&](double l) { return ray.at(l).first; }, first.oma_target),
                           min_scale([&](double l) { return ray.at(l).second; }, second.oma_target));
    return best;
  };

  const Best ab = solve_order(a, b, c_a, c_b);
  const Best ba = solve_order(b, a, c_b, c_a);
  const bool a_first = ab.cost <= ba.cost;
  const Best& best = a_first ? ab : ba;
  if (!std::isfinite(best.cost)) return sol;

  const double q_first = best.lambda, q_second = best.t * best.lambda;
  const double q_a = a_first ? q_first : q_second;
  const double q_b = a_first ? q_second : q_first;
  sol.power_a = q_a * c_a;
  sol.power_b = q_b * c_b;
  if (a_first) {
    std::tie(sol.predicted_eps_a, sol.predicted_eps_b) =
        fbl_pair_errors(q_a, q_b, rate, blocklength, a.mu, a.nu, b.mu, b.nu);
  } else {
    std::tie(sol.predicted_eps_b, sol.predicted_eps_a) =
        fbl_pair_errors(q_b, q_a, rate, blocklength, b.mu, b.nu, a.mu, a.nu);
  }
  sol.feasible = sol.predicted_eps_a <= a.oma_target * (1.0 + kSlack) &&
                 sol.predicted_eps_b <= b.oma_target * (1.0 + kSlack);
  sol.extra_cost = sol.power_a + sol.power_b - a.oma_power - b.oma_power;
  return sol;
}

}  // namespace urllc
