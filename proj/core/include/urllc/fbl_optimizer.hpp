#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace urllc {

/// Parameters identifying a precomputed power curve.
struct CurveKey {
  std::uint32_t remaining_rounds = 0;
  double rate = 1.0;
  std::uint32_t blocklength = 50;
  double eps_tar = 1e-5;
  double eps_drop = 1e-6;

  bool operator==(const CurveKey&) const = default;
};

/// Optimal first-attempt power of a fresh packet as a function of its channel
/// gain, normalized to unit pathloss and unit noise.
struct PowerCurve {
  CurveKey key;
  std::vector<double> gains;   // strictly increasing
  std::vector<double> powers;  // normalized transmit power, 0 = postpone
  std::vector<double> costs;   // expected normalized power from this round on
  std::vector<double> errors;  // failure probability of this round at that power
  double postpone_below = 0.0;
  /// Expected normalized power when the current round is skipped.
  double postpone_value = 0.0;

  std::uint32_t remaining_rounds() const { return key.remaining_rounds; }
};

/// Lowest channel gain still served in the last round: the eps_drop quantile of Exp(1).
double deep_fade_gain(double eps_drop);

/// Received SNR rho that brings the accumulated outage down to eps_tar, given
/// the statistics (mu_prev, nu_prev) of earlier copies. 0 when already reliable.
double last_round_snr(double mu_prev, double nu_prev, double rate, std::uint32_t blocklength, double eps_tar);

/// Last-round power rho * pathloss * noise / gain. Throws std::domain_error for gain <= 0.
double last_round_power(double gain, double pathloss, double mu_prev, double nu_prev, double rate,
                        std::uint32_t blocklength, double eps_tar, double noise);

struct RoundPlan {
  double snr = 0.0;    // received SNR of this round, 0 = postpone
  double power = 0.0;  // normalized transmit power snr / gain
  double cost = 0.0;   // expected normalized power from this round on
  double error = 1.0;  // failure probability of this round
};

/// Penultimate-round decision: minimizes power now plus the expected last-round
/// power (deep fades below deep_fade_gain are dropped) over the current power.
RoundPlan penultimate_plan(double gain, double mu_prev, double nu_prev, double rate,
                           std::uint32_t blocklength, double eps_tar, double eps_drop);

double penultimate_power(double gain, double pathloss, double mu_prev, double nu_prev, double rate,
                         std::uint32_t blocklength, double eps_tar, double eps_drop, double noise);

/// Expected normalized last-round power of a packet with statistics (mu, nu),
/// averaged over gains above the deep-fade threshold.
double expected_last_round_cost(double mu, double nu, double rate, std::uint32_t blocklength, double eps_tar,
                                double eps_drop);

/// Tabulates the first-attempt decision for 0, 1 or 2 remaining rounds.
PowerCurve build_power_curve(const CurveKey& key);

/// Interpolated normalized quantities at `gain` (clamped to the grid).
double curve_power(const PowerCurve& curve, double gain);
double curve_cost(const PowerCurve& curve, double gain);
double curve_error(const PowerCurve& curve, double gain);

/// Transmit power in watts for a user with the given pathloss.
double lookup_power(const PowerCurve& curve, double gain, double pathloss, double noise);

/// Memoized curve construction; when a cache directory is set, curves are read
/// from and written to it.
const PowerCurve& power_curve(const CurveKey& key);
void set_curve_cache_dir(std::string dir);

void save_power_curve(const PowerCurve& curve, const std::string& path);
/// Throws std::runtime_error on a missing or malformed file.
PowerCurve load_power_curve(const std::string& path);

}  // namespace urllc
