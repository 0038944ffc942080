#pragma once

#include <cstdint>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/rng.hpp"

namespace urllc {

struct UserEquipment {
  std::uint32_t id = 0;
  double distance = 0.0;  // meters
  double pathloss = 1.0;  // distance^alpha
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Uniform distance on [dist_min, dist_max]; a degenerate interval returns its endpoint.
double draw_distance(RngStream& rng, double dist_min, double dist_max);
double draw_distance(RngStream& rng, const SystemConfig& cfg);

/// |h|^2 of a unit-variance Rayleigh coefficient: Exp(1).
double draw_channel_gain(RngStream& rng);

/// Receive SNR power*gain / (pathloss*noise).
double received_snr(double power, double gain, double pathloss, double noise);

UserEquipment make_user(std::uint32_t id, double distance, double pathloss_exp);

/// Places every user for one trial. Draws come from the (phase 0, distance, user) streams.
std::vector<UserEquipment> place_users(const SystemConfig& cfg, std::uint64_t seed);

/// Index of the distance zone (0, 1, 2): [dist_min, dist_max] split into equal thirds.
int distance_zone(double distance, double dist_min, double dist_max);

}  // namespace urllc
