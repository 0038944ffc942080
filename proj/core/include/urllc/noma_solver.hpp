#pragma once

#include <span>
#include <utility>

namespace urllc {

/// Outcome of a two-user shared-slot power allocation.
struct PairPowerSolution {
  double power_a = 0.0;  // watts
  double power_b = 0.0;
  double predicted_eps_a = 1.0;
  double predicted_eps_b = 1.0;
  bool feasible = false;
  /// (power_a + power_b) minus the two dedicated-slot powers.
  double extra_cost = 0.0;
};

/// Parameters of the shared-slot outage expression, seen from user a.
/// s = P / (gamma * pathloss), phi = gamma * zeta.
struct PairGeometry {
  double s_a = 0.0;
  double s_b = 0.0;
  double phi_a = 0.0;
  double phi_b = 0.0;
  double noise = 1.0;
};

/// Outage probability of user a when sharing a slot with b under symmetric SIC.
double pair_error_closed_form(const PairGeometry& g);

/// Interference scaling left after combining the interferer's earlier copies:
/// 1 / (1 + sum of their SINRs).
double interference_reduction(std::span<const double> prior_sinrs);

struct PairUser {
  double gamma = 0.0;     // residual SNR
  double target = 1.0;    // error target of this round
  double pathloss = 1.0;  // d^alpha
  double zeta = 1.0;      // interference reduction applied to this user's signal
};

/// Minimum-sum-power allocation meeting both users' targets in one slot.
PairPowerSolution joint_power_min(const PairUser& a, const PairUser& b, double noise);

/// Error probabilities of a pair under finite blocklength with user a decoded first.
/// q_a, q_b are received powers normalized by the noise power.
std::pair<double, double> fbl_pair_errors(double q_a, double q_b, double rate, int blocklength,
                                          double mu_a, double nu_a, double mu_b, double nu_b);

struct FblUser {
  double gain = 0.0;      // |h|^2 of the upcoming transmission
  double pathloss = 1.0;  // d^alpha
  double mu = 0.0;        // accumulated information statistics of earlier copies
  double nu = 0.0;
  double oma_power = 0.0;   // optimal dedicated-slot power
  double oma_target = 1.0;  // failure probability that power achieves
};

/// Minimum-sum-power allocation meeting the dedicated-slot failure probabilities
/// of both users; the stronger received signal is decoded first.
PairPowerSolution fbl_joint_power_min(const FblUser& a, const FblUser& b, double rate, int blocklength,
                                      double noise);

}  // namespace urllc
