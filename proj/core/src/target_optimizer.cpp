#include "urllc/target_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "urllc/harq_math.hpp"
#include "urllc/numerics.hpp"

namespace urllc {

namespace {

constexpr double kHuge = 1e300;
constexpr char kCacheHeader[] = "urllc-targets v1";

// Budgets are memoized on a 1e-8 relative grid. The stored schedule is always the
// one computed at the grid value, so cache hits and fresh evaluations coincide.
std::int64_t budget_key(double budget) { return std::llround(std::log(budget) * 1e8); }
double budget_from_key(std::int64_t key) { return std::exp(static_cast<double>(key) * 1e-8); }
std::int64_t rate_key(double rate) { return std::llround(rate * 1e8); }

struct Memo {
  std::shared_mutex mu;
  std::map<std::tuple<std::uint32_t, std::int64_t>, std::vector<double>> cc;
  std::map<std::tuple<std::int64_t, std::int64_t>, InitialTarget> ir;
};

Memo& memo() {
  static Memo m;
  return m;
}

TargetSchedule rescale(std::vector<double> eps, double budget, double grid_budget) {
  TargetSchedule s;
  eps.back() *= budget / grid_budget;
  eps.back() = std::min(eps.back(), 1.0);
  s.factor = cc_expected_power_factor(eps);
  s.eps = std::move(eps);
  s.mode = TargetMode::cc;
  s.budget = budget;
  return s;
}

std::vector<double> cc_solve(std::uint32_t L, double budget) {
  if (budget >= 1.0) return std::vector<double>(L + 1, 1.0);
  if (L == 0) return {budget};
  const double log_budget = std::log(budget);
  auto unpack = [&](const std::vector<double>& u, std::vector<double>& eps) {
    eps.resize(L + 1);
    double rest = log_budget;
    for (std::uint32_t i = 0; i < L; ++i) {
      eps[i] = std::exp(u[i]);
      rest -= u[i];
    }
    eps[L] = std::exp(rest);
    for (std::uint32_t i = 0; i < L; ++i)
      if (u[i] >= 0.0) return false;
    return rest < 0.0;
  };
  std::vector<double> scratch;
  auto objective = [&](const std::vector<double>& u) {
    if (!unpack(u, scratch)) return kHuge;
    return cc_expected_power_factor(scratch);
  };
  std::vector<double> start(L, log_budget / (L + 1));
  auto res = numerics::nelder_mead(objective, start, 0.5, 1e-14, 40000);
  for (int restart = 0; restart < 3; ++restart) {
    auto again = numerics::nelder_mead(objective, res.x, 0.1, 1e-15, 40000);
    const bool settled = std::abs(again.value - res.value) <= 1e-12 * res.value;
    if (again.value <= res.value) res = again;
    if (settled) break;
  }
  if (!res.converged || res.value >= kHuge)
    throw OptimizationError(fmt::format("cc_optimal_targets did not converge (L={}, budget={})", L, budget),
                            res.value);
  std::vector<double> eps;
  unpack(res.x, eps);
  return eps;
}

double normalized_psi_last(double gamma, double a, double b) {
  // a = ln(1 - eps_pen), b = ln(1 - eps_last)
  const double tail = gamma * (a - 2.0) / 2.0 + a + (gamma + 1.0) * (gamma - a) * std::log1p(gamma) / gamma;
  return -gamma / a + a / (gamma * b) * tail;
}

}  // namespace

double cc_expected_power_factor(std::span<const double> eps) {
  double total = 0.0;
  double carry = 1.0;
  for (double e : eps) {
    if (e >= 1.0) continue;  // a round with target 1 spends nothing and changes nothing
    const double l = std::log1p(-e);
    total += -carry / l;
    carry *= (l + e) / l;
  }
  return total;
}

TargetSchedule cc_optimal_targets_uncached(std::uint32_t L, double eps_tar) {
  if (!(eps_tar > 0.0)) throw std::domain_error("cc_optimal_targets: budget must be positive");
  const auto key = budget_key(eps_tar);
  const double grid = budget_from_key(key);
  if (eps_tar >= 1.0) {
    TargetSchedule s;
    s.eps.assign(L + 1, 1.0);
    s.budget = eps_tar;
    return s;
  }
  return rescale(cc_solve(L, grid), eps_tar, grid);
}

TargetSchedule cc_optimal_targets(std::uint32_t L, double eps_tar) {
  if (!(eps_tar > 0.0)) throw std::domain_error("cc_optimal_targets: budget must be positive");
  if (eps_tar >= 1.0) return cc_optimal_targets_uncached(L, eps_tar);
  const auto key = budget_key(eps_tar);
  const double grid = budget_from_key(key);
  auto& m = memo();
  {
    std::shared_lock lock(m.mu);
    auto it = m.cc.find({L, key});
    if (it != m.cc.end()) return rescale(it->second, eps_tar, grid);
  }
  auto eps = cc_solve(L, grid);
  {
    std::unique_lock lock(m.mu);
    m.cc.emplace(std::make_tuple(L, key), eps);
  }
  return rescale(std::move(eps), eps_tar, grid);
}

double ir_psi_last(double gamma, double eps_pen, double eps_last, double pathloss, double noise) {
  if (gamma <= 0.0) return 0.0;
  return pathloss * noise * normalized_psi_last(gamma, std::log1p(-eps_pen), std::log1p(-eps_last));
}

NextTarget ir_next_target_search(double gamma, double budget) {
  if (budget >= 1.0 || gamma <= 0.0) return {1.0, 0.0, true};
  const double lo = std::log(budget), hi = 0.0;
  auto f = [&](double u) {
    const double eps = std::exp(u);
    if (eps <= budget || eps >= 1.0) return kHuge;
    return normalized_psi_last(gamma, std::log1p(-eps), std::log1p(-budget / eps));
  };
  constexpr int kPoints = 64;
  const double h = (hi - lo) / kPoints;
  int best = 1;
  double best_v = kHuge;
  for (int i = 1; i < kPoints; ++i) {
    const double v = f(lo + h * i);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const bool interior = best > 1 && best < kPoints - 1;
  const auto m = numerics::minimize_bracketed(f, lo + h * (best - 1), lo + h * (best + 1), 50);
  if (m.value <= best_v) return {std::exp(m.x), m.value, interior};
  return {std::exp(lo + h * best), best_v, interior};
}

double ir_next_target(double gamma, double budget, double /*pathloss*/, double /*noise*/) {
  return ir_next_target_search(gamma, budget).eps;
}

double ir_two_stage_cost(double gamma, double budget, double eps0) {
  if (gamma <= 0.0) return 0.0;
  if (eps0 >= 1.0) return ir_next_target_search(gamma, budget).value;
  const double p0 = -gamma / std::log1p(-eps0);
  const double next_budget = budget / eps0;
  static const numerics::Quadrature unit = numerics::gauss_legendre(200, 0.0, 1.0);
  double integral = 0.0;
  for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
    const double x = gamma * unit.nodes[i];
    const double residual = (gamma - x) / (1.0 + x);
    const double density = std::exp(-x / p0) / p0;
    integral += gamma * unit.weights[i] * density * ir_next_target_search(residual, next_budget).value;
  }
  return p0 + integral;
}

InitialTarget ir_initial_search_uncached(double rate, double eps_tar) {
  const double gamma = initial_gamma(rate);
  if (eps_tar >= 1.0) return {1.0, 0.0};
  const double lo = std::cbrt(eps_tar), hi = 0.6;
  auto f = [&](double e) { return ir_two_stage_cost(gamma, eps_tar, e); };
  constexpr int kPoints = 400;
  const double h = (hi - lo) / (kPoints - 1);
  int best = 0;
  double best_v = kHuge;
  for (int i = 0; i < kPoints; ++i) {
    const double v = f(lo + h * i);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + h * std::max(best - 1, 0);
  const double b = lo + h * std::min(best + 1, kPoints - 1);
  const auto m = numerics::minimize_bracketed(f, a, b, 30);
  if (m.value < best_v) return {m.x, m.value};
  return {lo + h * best, best_v};
}

InitialTarget ir_initial_search(double rate, double eps_tar) {
  const auto key = std::make_tuple(rate_key(rate), budget_key(eps_tar));
  auto& m = memo();
  {
    std::shared_lock lock(m.mu);
    auto it = m.ir.find(key);
    if (it != m.ir.end()) return it->second;
  }
  const auto r = ir_initial_search_uncached(rate, eps_tar);
  std::unique_lock lock(m.mu);
  return m.ir.emplace(key, r).first->second;
}

double ir_initial_target(double rate, double eps_tar) { return ir_initial_search(rate, eps_tar).eps; }

double expected_power_normalized(HarqMode mode, double rate, double gamma, double budget,
                                 std::uint32_t remaining) {
  if (gamma <= 0.0 || budget >= 1.0) return 0.0;
  if (mode == HarqMode::chase_combining) return gamma * cc_optimal_targets(remaining, budget).factor;
  switch (remaining) {
    case 0:
      return -gamma / std::log1p(-budget);
    case 1:
      return ir_next_target_search(gamma, budget).value;
    case 2:
      if (std::abs(gamma - initial_gamma(rate)) <= 1e-12 * gamma)
        return ir_initial_search(rate, budget).value;
      {
        auto f = [&](double e) { return ir_two_stage_cost(gamma, budget, e); };
        return numerics::scan_minimize(f, std::cbrt(budget), 0.6, 60, 30).value;
      }
    default:
      throw std::domain_error("incremental redundancy supports at most two retransmissions");
  }
}

double round_target(HarqMode mode, double rate, double gamma, double budget, std::uint32_t remaining) {
  if (gamma <= 0.0 || budget >= 1.0) return 1.0;
  if (mode == HarqMode::chase_combining) return cc_optimal_targets(remaining, budget).eps.front();
  switch (remaining) {
    case 0:
      return budget;
    case 1:
      return ir_next_target_search(gamma, budget).eps;
    case 2:
      if (std::abs(gamma - initial_gamma(rate)) <= 1e-12 * gamma) return ir_initial_search(rate, budget).eps;
      {
        auto f = [&](double e) { return ir_two_stage_cost(gamma, budget, e); };
        return numerics::scan_minimize(f, std::cbrt(budget), 0.6, 60, 30).x;
      }
    default:
      throw std::domain_error("incremental redundancy supports at most two retransmissions");
  }
}

double expected_oma_power(const PacketState& packet, const SystemConfig& cfg, double pathloss,
                          bool skip_current) {
  const double gamma = packet.residual_snr;
  if (gamma <= 0.0) return 0.0;
  const std::uint32_t remaining = cfg.max_retx - packet.round;
  if (skip_current && remaining == 0)
    throw std::domain_error("expected_oma_power: a last-round packet cannot be skipped");
  const std::uint32_t rounds = skip_current ? remaining - 1 : remaining;
  return pathloss * cfg.noise_power *
         expected_power_normalized(cfg.harq_mode, cfg.rate, gamma, packet.budget, rounds);
}

void save_target_cache(const std::string& path) {
  auto& m = memo();
  std::shared_lock lock(m.mu);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write target cache: " + path);
  out << kCacheHeader << '\n';
  for (const auto& [k, eps] : m.cc) {
    out << fmt::format("cc {} {}", std::get<0>(k), std::get<1>(k));
    for (double e : eps) out << fmt::format(" {:.17g}", e);
    out << '\n';
  }
  for (const auto& [k, r] : m.ir)
    out << fmt::format("ir {} {} {:.17g} {:.17g}\n", std::get<0>(k), std::get<1>(k), r.eps, r.value);
}

std::size_t load_target_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return 0;
  std::string line;
  if (!std::getline(in, line) || line != kCacheHeader)
    throw std::runtime_error("target cache has an unknown format: " + path);
  std::map<std::tuple<std::uint32_t, std::int64_t>, std::vector<double>> cc;
  std::map<std::tuple<std::int64_t, std::int64_t>, InitialTarget> ir;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "cc") {
      std::uint32_t L;
      std::int64_t key;
      ss >> L >> key;
      std::vector<double> eps(L + 1);
      for (auto& e : eps) ss >> e;
      if (!ss) throw std::runtime_error("malformed target cache record: " + line);
      cc[{L, key}] = std::move(eps);
    } else if (tag == "ir") {
      std::int64_t rk, bk;
      InitialTarget r;
      ss >> rk >> bk >> r.eps >> r.value;
      if (!ss) throw std::runtime_error("malformed target cache record: " + line);
      ir[{rk, bk}] = r;
    } else {
      throw std::runtime_error("malformed target cache record: " + line);
    }
  }
  auto& m = memo();
  std::unique_lock lock(m.mu);
  for (auto& [k, v] : cc) m.cc.insert_or_assign(k, v);
  for (auto& [k, v] : ir) m.ir.insert_or_assign(k, v);
  return cc.size() + ir.size();
}

void clear_target_cache() {
  auto& m = memo();
  std::unique_lock lock(m.mu);
  m.cc.clear();
  m.ir.clear();
}

}  // namespace urllc
