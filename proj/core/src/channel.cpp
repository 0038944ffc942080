#include "urllc/channel.hpp"

#include <algorithm>
#include <cmath>

namespace urllc {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

double draw_distance(RngStream& rng, double dist_min, double dist_max) {
  if (dist_min == dist_max) return dist_min;
  const double d = dist_min + (dist_max - dist_min) * rng.uniform();
  return std::clamp(d, dist_min, dist_max);
}

double draw_distance(RngStream& rng, const SystemConfig& cfg) {
  return draw_distance(rng, cfg.dist_min, cfg.dist_max);
}

double draw_channel_gain(RngStream& rng) { return rng.exponential(); }

double received_snr(double power, double gain, double pathloss, double noise) {
  return power * gain / (pathloss * noise);
}

UserEquipment make_user(std::uint32_t id, double distance, double pathloss_exp) {
  return UserEquipment{id, distance, std::pow(distance, pathloss_exp)};
}

std::vector<UserEquipment> place_users(const SystemConfig& cfg, std::uint64_t seed) {
  std::vector<UserEquipment> users;
  users.reserve(cfg.n_users);
  for (std::uint32_t u = 0; u < cfg.n_users; ++u) {
    RngStream rng(seed, StreamId{0, StreamPurpose::distance, u});
    users.push_back(make_user(u, draw_distance(rng, cfg), cfg.pathloss_exp));
  }
  return users;
}

int distance_zone(double distance, double dist_min, double dist_max) {
  if (dist_max <= dist_min) return 0;
  const double third = (dist_max - dist_min) / 3.0;
  if (distance < dist_min + third) return 0;
  if (distance < dist_min + 2.0 * third) return 1;
  return 2;
}

}  // namespace urllc
