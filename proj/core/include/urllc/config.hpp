#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace urllc {

enum class CsiMode { statistical, instantaneous };
enum class HarqMode { chase_combining, incremental_redundancy };
enum class AccessMode { oma, noma };
enum class PairingStrategy { power_conservative, resource_conservative };

std::string_view to_string(CsiMode m);
std::string_view to_string(HarqMode m);
std::string_view to_string(AccessMode m);
std::string_view to_string(PairingStrategy s);

/// Raised when a configuration violates its invariants. `key()` names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Full description of one experiment. All powers are linear watts.
///
/// Defaults reproduce the reference scenario: 40 devices, 10 slots per uplink
/// phase, two retransmissions, 50-symbol packets, 1e-5 final BLER, 1e-6
/// deep-fade threshold, distances in [20, 120] m, pathloss exponent 2 and a
/// per-symbol noise power of -129.1 dBm.
struct SystemConfig {
  std::uint32_t n_users = 40;
  std::uint32_t n_slots_per_phase = 10;
  std::uint32_t max_retx = 2;
  std::uint32_t blocklength = 50;
  double rate = 1.0;
  double activation_prob = 0.2;
  double target_bler = 1e-5;
  double drop_threshold = 1e-6;
  double dist_min = 20.0;
  double dist_max = 120.0;
  double pathloss_exp = 2.0;
  double noise_power = 1.2302687708123812e-16;  // -129.1 dBm
  CsiMode csi_mode = CsiMode::statistical;
  HarqMode harq_mode = HarqMode::chase_combining;
  AccessMode access_mode = AccessMode::oma;
  PairingStrategy pairing_strategy = PairingStrategy::power_conservative;
  std::uint32_t n_phases = 10000;
  std::uint32_t warmup_phases = 30;
  std::uint64_t seed = 1;
  /// When true, user distances are drawn from the master seed only and are shared
  /// by every trial of a sweep; otherwise each trial redraws them.
  bool fixed_geometry = false;

  /// Information bits per packet, B = R * K.
  double bits_per_packet() const { return rate * blocklength; }
  /// Mean number of new packets per uplink phase.
  double mean_arrivals() const { return activation_prob * n_users; }

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

/// Warmup long enough to reach stationary buffer occupancy: ten packet lifetimes.
inline std::uint32_t default_warmup(std::uint32_t max_retx) { return 10 * (max_retx + 1); }

}  // namespace urllc
