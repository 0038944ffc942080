#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They share no numerical code with the library beyond the function under test.

#include <cstdint>
#include <functional>
#include <span>

#include "urllc/matching.hpp"
#include "urllc/noma_solver.hpp"

namespace oracle {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Monte Carlo frequency of the two shared-slot failure events of user a, in
/// normalized units: x ~ Exp(s_a), y ~ Exp(s_b), failure iff
///   {x < n, y > phi_a x + n}  or  {x < phi_b y + n, y < phi_a x + n}.
Estimate pair_error_mc(const urllc::PairGeometry& g, std::uint64_t draws, std::uint64_t seed);

/// Expected Chase-combining power (watts) of the target sequence `eps` by
/// direct nested integration over the per-round SNR densities.
double cc_expected_power(std::span<const double> eps, double gamma, double pathloss, double noise);

/// Exact two-round IR expected power (penultimate power plus the mean last-round
/// power over the failing SNR range), integrated adaptively.
double ir_two_round_power(double gamma, double eps_pen, double eps_last, double pathloss, double noise);

/// Golden-section argmin of a unimodal f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

struct MatchResult {
  std::uint32_t size = 0;
  double cost = 0.0;
};

/// Cheapest matching of size min(q, maximum matching size), by exhaustive enumeration.
MatchResult brute_force_matching(std::uint32_t n, std::span<const urllc::PairEdge> edges, std::uint32_t q);

struct GridPoint {
  bool found = false;
  double power_a = 0.0;
  double power_b = 0.0;
  double sum() const { return power_a + power_b; }
};

/// Minimum sum power over a log grid of n x n powers in [P_oma, span * P_oma]
/// per user, subject to both closed-form outage constraints.
GridPoint pair_power_grid(const urllc::PairUser& a, const urllc::PairUser& b, double noise, int n = 400,
                          double span = 1e4);

/// Same for the finite-blocklength pair with the stronger received signal decoded first.
GridPoint fbl_pair_power_grid(const urllc::FblUser& a, const urllc::FblUser& b, double rate, int blocklength,
                              double noise, int n = 400, double span = 1e4);

/// Sample mean and variance of K-symbol averages of the per-symbol information
/// density of a Gaussian codebook at SNR s over complex AWGN.
struct Moments {
  double mean = 0.0;
  double var = 0.0;
};
Moments symbol_level_mi(double snr, int blocklength, std::uint64_t codewords, std::uint64_t seed);

/// Gaussian CDF via std::erfc.
double normal_cdf(double x, double mean, double var);

/// Direct evaluation of the penultimate-round objective: normalized power now
/// plus the conditional failure probability times the mean last-round power.
double penultimate_objective(double snr, double gain, double mu, double nu, double rate, int blocklength,
                             double eps_tar, double eps_drop);

/// Last-round SNR by plain bisection on the outage equation.
double last_round_snr(double mu, double nu, double rate, int blocklength, double eps_tar);

}  // namespace oracle
