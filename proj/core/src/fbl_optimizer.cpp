#include "urllc/fbl_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "urllc/harq_math.hpp"
#include "urllc/numerics.hpp"

namespace urllc {

namespace {

constexpr char kCurveHeader[] = "urllc-curve v1";
constexpr int kGridPoints = 256;
constexpr double kMaxGainQuantile = 1e-9;

// Information statistics after adding a copy received at SNR x.
double add_mean(double mu, double x) { return mu + std::log1p(x); }
double add_var(double nu, double x, std::uint32_t k) { return nu + 2.0 * x / (k * (1.0 + x)); }

double log_outage(double rate, double mu, double nu) {
  return numerics::log_gaussian_cdf(rate * M_LN2, mu, nu);
}

// Global minimum of f over ln x in [lo, hi]: a scan locates the basin, Brent refines it.
numerics::Minimum minimize_log(const std::function<double(double)>& f, double lo, double hi, int points) {
  return numerics::scan_minimize([&](double u) { return f(std::exp(u)); }, lo, hi, points, 40);
}

}  // namespace

double deep_fade_gain(double eps_drop) { return -std::log1p(-eps_drop); }

double last_round_snr(double mu_prev, double nu_prev, double rate, std::uint32_t blocklength, double eps_tar) {
  const double target = std::log(eps_tar);
  if (log_outage(rate, mu_prev, nu_prev) <= target) return 0.0;
  auto excess = [&](double log_rho) {
    const double rho = std::exp(log_rho);
    return log_outage(rate, add_mean(mu_prev, rho), add_var(nu_prev, rho, blocklength)) - target;
  };
  double lo = -40.0, hi = 0.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi += 2.0;
    if (hi > 200.0) throw std::runtime_error("last_round_snr: no power reaches the target");
  }
  while (excess(lo) <= 0.0 && lo > -700.0) lo -= 20.0;
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  const auto r = boost::math::tools::toms748_solve(excess, lo, hi, tol, iters);
  return std::exp(0.5 * (r.first + r.second));
}

double last_round_power(double gain, double pathloss, double mu_prev, double nu_prev, double rate,
                        std::uint32_t blocklength, double eps_tar, double noise) {
  if (!(gain > 0.0)) throw std::domain_error("last_round_power: channel gain must be positive");
  return last_round_snr(mu_prev, nu_prev, rate, blocklength, eps_tar) * pathloss * noise / gain;
}

double expected_last_round_cost(double mu, double nu, double rate, std::uint32_t blocklength, double eps_tar,
                                double eps_drop) {
  return last_round_snr(mu, nu, rate, blocklength, eps_tar) * numerics::expint_e1(deep_fade_gain(eps_drop));
}

RoundPlan penultimate_plan(double gain, double mu_prev, double nu_prev, double rate, std::uint32_t blocklength,
                           double eps_tar, double eps_drop) {
  const double e1 = numerics::expint_e1(deep_fade_gain(eps_drop));
  const double log_f0 = log_outage(rate, mu_prev, nu_prev);
  auto objective = [&](double x) {
    const double mu = add_mean(mu_prev, x), nu = add_var(nu_prev, x, blocklength);
    const double cond = std::min(std::exp(log_outage(rate, mu, nu) - log_f0), 1.0);
    return x / gain + cond * last_round_snr(mu, nu, rate, blocklength, eps_tar) * e1;
  };
  RoundPlan plan;
  plan.cost = objective(0.0);
  plan.error = 1.0;
  const auto m = minimize_log(objective, -12.0, 12.0, 72);
  if (m.value < plan.cost) {
    plan.snr = std::exp(m.x);
    plan.power = plan.snr / gain;
    plan.cost = m.value;
    plan.error = std::min(std::exp(log_outage(rate, add_mean(mu_prev, plan.snr),
                                              add_var(nu_prev, plan.snr, blocklength)) -
                                   log_f0),
                          1.0);
  }
  return plan;
}

double penultimate_power(double gain, double pathloss, double mu_prev, double nu_prev, double rate,
                         std::uint32_t blocklength, double eps_tar, double eps_drop, double noise) {
  if (!(gain > 0.0)) throw std::domain_error("penultimate_power: channel gain must be positive");
  return penultimate_plan(gain, mu_prev, nu_prev, rate, blocklength, eps_tar, eps_drop).power * pathloss * noise;
}

namespace {

// Expected cost of the penultimate round for a packet holding (mu, nu), averaged over
// the next channel gain. Below the knee the packet is postponed at a constant cost.
double continuation_value(double mu, double nu, const CurveKey& k) {
  static const numerics::Quadrature laguerre = numerics::gauss_laguerre(128);
  auto plan = [&](double z) { return penultimate_plan(z, mu, nu, k.rate, k.blocklength, k.eps_tar, k.eps_drop); };
  const double postpone = expected_last_round_cost(mu, nu, k.rate, k.blocklength, k.eps_tar, k.eps_drop);
  double lo = -20.0, hi = 8.0, knee;
  if (plan(std::exp(lo)).snr > 0.0) {
    knee = 0.0;
  } else if (plan(std::exp(hi)).snr == 0.0) {
    knee = std::exp(hi);
  } else {
    for (int i = 0; i < 40 && hi - lo > 1e-6; ++i) {
      const double mid = 0.5 * (lo + hi);
      (plan(std::exp(mid)).snr > 0.0 ? hi : lo) = mid;
    }
    knee = std::exp(0.5 * (lo + hi));
  }
  double tail = 0.0;
  for (std::size_t i = 0; i < laguerre.nodes.size(); ++i) {
    if (laguerre.weights[i] < 1e-300) continue;
    tail += laguerre.weights[i] * plan(knee + laguerre.nodes[i]).cost;
  }
  return -std::expm1(-knee) * postpone + std::exp(-knee) * tail;
}

PowerCurve build_last(const CurveKey& k, const std::vector<double>& gains) {
  PowerCurve c;
  const double rho = last_round_snr(0.0, 0.0, k.rate, k.blocklength, k.eps_tar);
  for (double g : gains) {
    c.gains.push_back(g);
    c.powers.push_back(rho / g);
    c.costs.push_back(rho / g);
    c.errors.push_back(k.eps_tar);
  }
  return c;
}

PowerCurve build_penultimate(const CurveKey& k, const std::vector<double>& gains) {
  PowerCurve c;
  for (double g : gains) {
    const auto p = penultimate_plan(g, 0.0, 0.0, k.rate, k.blocklength, k.eps_tar, k.eps_drop);
    c.gains.push_back(g);
    c.powers.push_back(p.power);
    c.costs.push_back(p.cost);
    c.errors.push_back(p.error);
  }
  c.postpone_value = expected_last_round_cost(0.0, 0.0, k.rate, k.blocklength, k.eps_tar, k.eps_drop);
  return c;
}

PowerCurve build_first_of_three(const CurveKey& k, const std::vector<double>& gains) {
  // The continuation after a failed first copy depends on the copy only through its
  // received SNR x0, so it is tabulated once on a grid of x0.
  constexpr int kTable = 97;
  constexpr double kLo = -3.0 * M_LN10, kHi = 3.0 * M_LN10;
  std::vector<double> log_x(kTable), value(kTable);
  for (int i = 0; i < kTable; ++i) {
    log_x[i] = kLo + (kHi - kLo) * i / (kTable - 1);
    const double x = std::exp(log_x[i]);
    value[i] = continuation_value(add_mean(0.0, x), add_var(0.0, x, k.blocklength), k);
  }
  const double skip_value = continuation_value(0.0, 0.0, k);
  auto continuation = [&](double x) {
    if (x <= 0.0) return skip_value;
    const double lx = std::log(x);
    if (lx <= kLo) return skip_value + (value[0] - skip_value) * x / std::exp(kLo);
    if (lx >= kHi) return value.back();
    const double pos = (lx - kLo) / (kHi - kLo) * (kTable - 1);
    const int i = std::min(static_cast<int>(pos), kTable - 2);
    const double w = pos - i;
    return value[i] * (1.0 - w) + value[i + 1] * w;
  };

  PowerCurve c;
  for (double g : gains) {
    auto objective = [&](double x) {
      const double f = std::exp(log_outage(k.rate, add_mean(0.0, x), add_var(0.0, x, k.blocklength)));
      return x / g + f * continuation(x);
    };
    double snr = 0.0, cost = skip_value, error = 1.0;
    const auto m = minimize_log(objective, kLo, kHi, 96);
    if (m.value < cost) {
      snr = std::exp(m.x);
      cost = m.value;
      error = std::exp(log_outage(k.rate, add_mean(0.0, snr), add_var(0.0, snr, k.blocklength)));
    }
    c.gains.push_back(g);
    c.powers.push_back(snr / g);
    c.costs.push_back(cost);
    c.errors.push_back(error);
  }
  c.postpone_value = skip_value;
  return c;
}

double interpolate(const PowerCurve& c, const std::vector<double>& ys, double gain) {
  const auto& xs = c.gains;
  if (gain <= xs.front()) return ys.front();
  if (gain >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), gain);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = std::log(gain / xs[i]) / std::log(xs[i + 1] / xs[i]);
  return ys[i] * (1.0 - w) + ys[i + 1] * w;
}

}  // namespace

PowerCurve build_power_curve(const CurveKey& key) {
  if (key.remaining_rounds > 2)
    throw std::domain_error("power curves are available for at most two remaining rounds");
  std::vector<double> gains(kGridPoints);
  const double lo = std::log(deep_fade_gain(key.eps_drop)), hi = std::log(-std::log(kMaxGainQuantile));
  for (int i = 0; i < kGridPoints; ++i) gains[i] = std::exp(lo + (hi - lo) * i / (kGridPoints - 1));
  PowerCurve c;
  switch (key.remaining_rounds) {
    case 0:
      c = build_last(key, gains);
      break;
    case 1:
      c = build_penultimate(key, gains);
      break;
    default:
      c = build_first_of_three(key, gains);
      break;
  }
  c.key = key;
  c.postpone_below = 0.0;
  for (std::size_t i = 0; i < c.gains.size() && c.powers[i] == 0.0; ++i) c.postpone_below = c.gains[i];
  return c;
}

double curve_power(const PowerCurve& c, double gain) {
  if (gain <= c.postpone_below) return 0.0;
  const auto it = std::upper_bound(c.gains.begin(), c.gains.end(), gain);
  if (it != c.gains.begin() && it != c.gains.end()) {
    const std::size_t i = static_cast<std::size_t>(it - c.gains.begin()) - 1;
    if (c.powers[i] == 0.0) return c.powers[i + 1];
  }
  if (gain < c.gains.front() && c.key.remaining_rounds > 0) return 0.0;
  return interpolate(c, c.powers, gain);
}

double curve_cost(const PowerCurve& c, double gain) {
  if (gain < c.gains.front() && c.key.remaining_rounds > 0) return c.postpone_value;
  return interpolate(c, c.costs, gain);
}

double curve_error(const PowerCurve& c, double gain) {
  if (curve_power(c, gain) == 0.0) return 1.0;
  const auto it = std::upper_bound(c.gains.begin(), c.gains.end(), gain);
  if (it != c.gains.begin() && it != c.gains.end()) {
    const std::size_t i = static_cast<std::size_t>(it - c.gains.begin()) - 1;
    if (c.powers[i] == 0.0) return c.errors[i + 1];
  }
  return interpolate(c, c.errors, gain);
}

double lookup_power(const PowerCurve& curve, double gain, double pathloss, double noise) {
  return curve_power(curve, gain) * pathloss * noise;
}

void save_power_curve(const PowerCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write power curve: " + path);
  const auto& k = c.key;
  out << kCurveHeader << '\n';
  out << fmt::format("{} {:.17g} {} {:.17g} {:.17g} {:.17g} {:.17g}\n", k.remaining_rounds, k.rate, k.blocklength,
                     k.eps_tar, k.eps_drop, c.postpone_below, c.postpone_value);
  for (std::size_t i = 0; i < c.gains.size(); ++i)
    out << fmt::format("{:.17g} {:.17g} {:.17g} {:.17g}\n", c.gains[i], c.powers[i], c.costs[i], c.errors[i]);
}

PowerCurve load_power_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read power curve: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader)
    throw std::runtime_error("power curve has an unknown format: " + path);
  PowerCurve c;
  auto& k = c.key;
  if (!std::getline(in, line)) throw std::runtime_error("power curve is truncated: " + path);
  std::istringstream head(line);
  head >> k.remaining_rounds >> k.rate >> k.blocklength >> k.eps_tar >> k.eps_drop >> c.postpone_below >>
      c.postpone_value;
  if (!head) throw std::runtime_error("malformed power curve header: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double g, p, cost, e;
    if (!(ss >> g >> p >> cost >> e)) throw std::runtime_error("malformed power curve row: " + line);
    if (!c.gains.empty() && g <= c.gains.back())
      throw std::runtime_error("power curve gains are not increasing: " + path);
    c.gains.push_back(g);
    c.powers.push_back(p);
    c.costs.push_back(cost);
    c.errors.push_back(e);
  }
  if (c.gains.size() < 2) throw std::runtime_error("power curve has too few points: " + path);
  return c;
}

namespace {

struct CurveMemo {
  std::mutex mu;
  std::string dir;
  std::map<std::tuple<std::uint32_t, double, std::uint32_t, double, double>, std::unique_ptr<PowerCurve>> curves;
};

CurveMemo& curve_memo() {
  static CurveMemo m;
  return m;
}

std::string curve_file(const std::string& dir, const CurveKey& k) {
  return (std::filesystem::path(dir) /
          fmt::format("curve_l{}_r{:.6g}_k{}_t{:.6g}_d{:.6g}.txt", k.remaining_rounds, k.rate, k.blocklength,
                      k.eps_tar, k.eps_drop))
      .string();
}

}  // namespace

void set_curve_cache_dir(std::string dir) {
  auto& m = curve_memo();
  std::lock_guard lock(m.mu);
  m.dir = std::move(dir);
}

const PowerCurve& power_curve(const CurveKey& key) {
  auto& m = curve_memo();
  std::lock_guard lock(m.mu);
  const auto id = std::make_tuple(key.remaining_rounds, key.rate, key.blocklength, key.eps_tar, key.eps_drop);
  auto it = m.curves.find(id);
  if (it != m.curves.end()) return *it->second;
  std::unique_ptr<PowerCurve> curve;
  if (!m.dir.empty()) {
    const auto path = curve_file(m.dir, key);
    if (std::filesystem::exists(path)) {
      auto loaded = load_power_curve(path);
      if (loaded.key == key) curve = std::make_unique<PowerCurve>(std::move(loaded));
    }
    if (!curve) {
      curve = std::make_unique<PowerCurve>(build_power_curve(key));
      std::filesystem::create_directories(m.dir);
      save_power_curve(*curve, path);
    }
  } else {
    curve = std::make_unique<PowerCurve>(build_power_curve(key));
  }
  return *m.curves.emplace(id, std::move(curve)).first->second;
}

}  // namespace urllc
