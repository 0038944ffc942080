#pragma once

namespace urllc {

/// Mean and variance (nats) of the mutual information carried by one copy.
struct MiStats {
  double mean = 0.0;
  double var = 0.0;
};

/// Residual SNR of a fresh packet, 2^R - 1.
double initial_gamma(double rate);

/// Chase combining: SINRs add up. Returns max(gamma - sinr, 0).
double cc_residual_update(double gamma, double sinr);
/// Incremental redundancy: mutual information adds up. Returns max((gamma - sinr)/(1 + sinr), 0).
double ir_residual_update(double gamma, double sinr);

/// Outage probability 1 - exp(-gamma * pathloss * noise / power) of a single-user slot.
double oma_error_prob(double gamma, double power, double pathloss, double noise);

/// Minimum power reaching failure probability `eps`: -gamma * pathloss * noise / ln(1 - eps).
/// Throws std::domain_error unless 0 < eps < 1.
double power_for_target(double gamma, double eps, double pathloss, double noise);

/// Statistics of one round given its effective SINR `s` and the ratio
/// t = Q_sig / (Q_sig + Q_int + noise).
MiStats mi_round_stats(double s, double t, int blocklength);

/// Failure probability of the current round conditioned on all earlier ones
/// failing: F(R ln 2; mu_prev + add.mean, nu_prev + add.var) / F(R ln 2; mu_prev, nu_prev).
double fbl_round_error(double rate, double mu_prev, double nu_prev, const MiStats& add);

/// F(R ln 2; mu, var): probability that the accumulated information is short of the packet.
double fbl_outage(double rate, double mu, double var);

/// Ratio F(R ln 2; mu1, nu1) / F(R ln 2; mu0, nu0) computed in log domain, clamped to [0, 1].
double fbl_conditional(double rate, double mu1, double nu1, double mu0, double nu0);

}  // namespace urllc
