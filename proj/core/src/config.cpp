#include "urllc/config.hpp"

#include <cmath>

namespace urllc {

std::string_view to_string(CsiMode m) {
  return m == CsiMode::statistical ? "statistical" : "instantaneous";
}
std::string_view to_string(HarqMode m) { return m == HarqMode::chase_combining ? "cc" : "ir"; }
std::string_view to_string(AccessMode m) { return m == AccessMode::oma ? "oma" : "noma"; }
std::string_view to_string(PairingStrategy s) {
  return s == PairingStrategy::power_conservative ? "pc" : "rc";
}

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(n_users >= 1, "n_users", "must be at least 1");
  require(n_slots_per_phase >= 1, "n_slots", "must be at least 1");
  require(blocklength >= 1, "blocklength", "must be at least 1");
  require(std::isfinite(rate) && rate > 0.0, "rate", "must be positive");
  require(activation_prob >= 0.0 && activation_prob <= 1.0, "activation_prob",
          "must lie in [0, 1]");
  require(target_bler > 0.0 && target_bler < 1.0, "target_bler", "must lie in (0, 1)");
  require(drop_threshold > 0.0 && drop_threshold < target_bler, "drop_threshold",
          "must lie in (0, target_bler)");
  require(dist_min > 0.0, "dist_min", "must be positive");
  require(dist_min < dist_max, "dist_max", "must exceed dist_min");
  require(std::isfinite(pathloss_exp) && pathloss_exp >= 0.0, "pathloss_exp",
          "must be non-negative");
  require(std::isfinite(noise_power) && noise_power > 0.0, "noise", "must be positive");
  require(n_phases >= 1, "n_phases", "must be at least 1");
  if (csi_mode == CsiMode::instantaneous) {
    require(harq_mode == HarqMode::incremental_redundancy, "harq",
            "instantaneous CSI is only defined for incremental redundancy");
    require(max_retx <= 2, "max_retx", "instantaneous CSI power curves support at most 2");
  }
  if (harq_mode == HarqMode::incremental_redundancy) {
    require(max_retx <= 2, "max_retx", "incremental redundancy targets support at most 2");
  }
}

}  // namespace urllc
