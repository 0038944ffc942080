#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
double integrate(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

}  // namespace

Estimate pair_error_mc(const urllc::PairGeometry& g, std::uint64_t draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> ex(1.0 / g.s_a), ey(1.0 / g.s_b);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double x = ex(gen), y = g.s_b > 0.0 ? ey(gen) : 0.0;
    const bool first = x < g.noise && y > g.phi_a * x + g.noise;
    const bool second = x < g.phi_b * y + g.noise && y < g.phi_a * x + g.noise;
    hits += (first || second) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / draws;
  return {p, std::sqrt(std::max(p * (1.0 - p), 1.0 / draws) / draws)};
}

namespace {

// Expected normalized power from round l on, for residual SNR gamma.
double cc_tail(std::span<const double> eps, std::size_t l, double gamma) {
  const double c = -std::log1p(-eps[l]);
  const double here = gamma / c;
  if (l + 1 == eps.size() || gamma <= 0.0) return here;
  const double mean_snr = gamma / c;
  auto integrand = [&](double x) { return cc_tail(eps, l + 1, gamma - x) * std::exp(-x / mean_snr) / mean_snr; };
  return here + integrate(integrand, 0.0, gamma);
}

}  // namespace

double cc_expected_power(std::span<const double> eps, double gamma, double pathloss, double noise) {
  return cc_tail(eps, 0, gamma) * pathloss * noise;
}

double ir_two_round_power(double gamma, double eps_pen, double eps_last, double pathloss, double noise) {
  const double c_pen = -std::log1p(-eps_pen), c_last = -std::log1p(-eps_last);
  const double mean_snr = gamma / c_pen;
  auto integrand = [&](double x) { return (gamma - x) / (1.0 + x) * std::exp(-x / mean_snr) / mean_snr; };
  return (gamma / c_pen + integrate(integrand, 0.0, gamma) / c_last) * pathloss * noise;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

void enumerate(std::uint32_t n, const std::vector<std::vector<double>>& w, std::uint32_t first, std::uint32_t used,
               std::uint32_t size, double cost, std::vector<MatchResult>& best) {
  if (cost < best[size].cost) best[size].cost = cost;
  while (first < n && (used >> first & 1u)) ++first;
  if (first >= n) return;
  // Leave `first` unmatched.
  enumerate(n, w, first + 1, used | (1u << first), size, cost, best);
  for (std::uint32_t j = first + 1; j < n; ++j)
    if (!(used >> j & 1u) && std::isfinite(w[first][j]))
      enumerate(n, w, first + 1, used | (1u << first) | (1u << j), size + 1, cost + w[first][j], best);
}

}  // namespace

MatchResult brute_force_matching(std::uint32_t n, std::span<const urllc::PairEdge> edges, std::uint32_t q) {
  std::vector<std::vector<double>> w(n, std::vector<double>(n, kInf));
  for (const auto& e : edges) {
    w[e.a][e.b] = std::min(w[e.a][e.b], e.cost);
    w[e.b][e.a] = w[e.a][e.b];
  }
  std::vector<MatchResult> best(n / 2 + 1);
  for (std::uint32_t s = 0; s < best.size(); ++s) best[s] = {s, kInf};
  enumerate(n, w, 0, 0, 0, 0.0, best);
  std::uint32_t size = std::min<std::uint32_t>(q, n / 2);
  while (size > 0 && !std::isfinite(best[size].cost)) --size;
  return best[size];
}

namespace {

std::vector<double> log_grid(double lo, double span, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(span, static_cast<double>(i) / (n - 1));
  return v;
}

}  // namespace

GridPoint pair_power_grid(const urllc::PairUser& a, const urllc::PairUser& b, double noise, int n, double span) {
  const double oma_a = -a.gamma * a.pathloss * noise / std::log1p(-a.target);
  const double oma_b = -b.gamma * b.pathloss * noise / std::log1p(-b.target);
  const auto pa = log_grid(oma_a, span, n), pb = log_grid(oma_b, span, n);
  GridPoint best;
  double best_sum = kInf;
  for (double x : pa)
    for (double y : pb) {
      if (x + y >= best_sum) continue;
      const double sa = x / (a.gamma * a.pathloss), sb = y / (b.gamma * b.pathloss);
      const double ea = urllc::pair_error_closed_form({sa, sb, a.gamma * a.zeta, b.gamma * b.zeta, noise});
      const double eb = urllc::pair_error_closed_form({sb, sa, b.gamma * b.zeta, a.gamma * a.zeta, noise});
      if (ea <= a.target && eb <= b.target) {
        best = {true, x, y};
        best_sum = x + y;
      }
    }
  return best;
}

namespace {

// Failure probability of a user holding (mu, nu) that adds a copy received at
// SINR s whose signal share of the total received power is t.
double conditional_error(double rate, double mu, double nu, double s, double t, int k) {
  const double thr = rate * std::log(2.0);
  const double before = (mu == 0.0 && nu == 0.0) ? 1.0 : normal_cdf(thr, mu, nu);
  const double after = normal_cdf(thr, mu + std::log1p(s), nu + 2.0 * t / k);
  return before > 0.0 ? std::min(after / before, 1.0) : 0.0;
}

}  // namespace

GridPoint fbl_pair_power_grid(const urllc::FblUser& a, const urllc::FblUser& b, double rate, int blocklength,
                              double noise, int n, double span) {
  const auto pa = log_grid(a.oma_power, span, n), pb = log_grid(b.oma_power, span, n);
  GridPoint best;
  double best_sum = kInf;
  for (double x : pa)
    for (double y : pb) {
      if (x + y >= best_sum) continue;
      double qa = x * a.gain / (a.pathloss * noise), qb = y * b.gain / (b.pathloss * noise);
      const bool a_first = qa >= qb;
      const double q1 = a_first ? qa : qb, q2 = a_first ? qb : qa;
      const urllc::FblUser& u1 = a_first ? a : b;
      const urllc::FblUser& u2 = a_first ? b : a;
      const double e1 = conditional_error(rate, u1.mu, u1.nu, q1 / (q2 + 1.0), q1 / (q1 + q2 + 1.0), blocklength);
      const double clean = conditional_error(rate, u2.mu, u2.nu, q2, q2 / (q2 + 1.0), blocklength);
      const double dirty =
          conditional_error(rate, u2.mu, u2.nu, q2 / (q1 + 1.0), q2 / (q1 + q2 + 1.0), blocklength);
      const double e2 = (1.0 - e1) * clean + e1 * dirty;
      const double ea = a_first ? e1 : e2, eb = a_first ? e2 : e1;
      if (ea <= a.oma_target && eb <= b.oma_target) {
        best = {true, x, y};
        best_sum = x + y;
      }
    }
  return best;
}

Moments symbol_level_mi(double snr, int blocklength, std::uint64_t codewords, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));  // CN(0,1) per real component
  const double amp = std::sqrt(snr);
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t c = 0; c < codewords; ++c) {
    double acc = 0.0;
    for (int k = 0; k < blocklength; ++k) {
      const double xr = half(gen), xi = half(gen), nr = half(gen), ni = half(gen);
      const double yr = amp * xr + nr, yi = amp * xi + ni;
      acc += std::log1p(snr) + (yr * yr + yi * yi) / (snr + 1.0) - (nr * nr + ni * ni);
    }
    const double avg = acc / blocklength;
    sum += avg;
    sumsq += avg * avg;
  }
  const double m = sum / codewords;
  return {m, (sumsq / codewords - m * m) * codewords / (codewords - 1)};
}

double normal_cdf(double x, double mean, double var) {
  if (var <= 0.0) return x < mean ? 0.0 : 1.0;
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

double last_round_snr(double mu, double nu, double rate, int blocklength, double eps_tar) {
  const double thr = rate * std::log(2.0);
  auto outage = [&](double rho) { return normal_cdf(thr, mu + std::log1p(rho), nu + 2.0 * rho / (blocklength * (1.0 + rho))); };
  if (outage(0.0) <= eps_tar) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (outage(hi) > eps_tar) hi *= 2.0;
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (outage(mid) > eps_tar ? lo : hi) = mid;
  }
  return hi;
}

double penultimate_objective(double snr, double gain, double mu, double nu, double rate, int blocklength,
                             double eps_tar, double eps_drop) {
  const double thr = rate * std::log(2.0);
  const double mu1 = mu + std::log1p(snr), nu1 = nu + 2.0 * snr / (blocklength * (1.0 + snr));
  const double before = (mu == 0.0 && nu == 0.0) ? 1.0 : normal_cdf(thr, mu, nu);
  const double cond = std::min(normal_cdf(thr, mu1, nu1) / before, 1.0);
  const double z_f = -std::log1p(-eps_drop);
  const double e1 = -std::expint(-z_f);
  return snr / gain + cond * last_round_snr(mu1, nu1, rate, blocklength, eps_tar) * e1;
}

}  // namespace oracle
