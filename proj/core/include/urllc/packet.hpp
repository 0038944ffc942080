#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace urllc {

/// Unique packet identity: a user spawns at most one packet per phase.
struct PacketId {
  std::uint64_t birth_phase = 0;
  std::uint32_t owner = 0;

  auto operator<=>(const PacketId&) const = default;
};

/// One transmitted copy of a packet.
struct CopyRecord {
  std::uint64_t phase_index = 0;
  double transmit_power = 0.0;  // watts
  double channel_gain = 0.0;    // |h|^2
  double achieved_sinr = 0.0;   // SINR credited to the HARQ combiner (after SIC)
  std::optional<PacketId> partner;
  bool interference_cancelled = false;
};

enum class PacketStatus { pending, delivered, dropped };

/// State of one HARQ process.
struct PacketState {
  PacketId id;
  std::uint32_t round = 0;
  double residual_snr = 0.0;  // statistical CSI
  double budget = 0.0;        // remaining error budget
  double mi_mean = 0.0;       // instantaneous CSI, nats
  double mi_var = 0.0;
  double mi_realized = 0.0;  // accumulated information actually received (not known to the scheduler)
  std::vector<CopyRecord> copies;
  std::vector<PacketId> past_partners;
  PacketStatus status = PacketStatus::pending;
  double energy = 0.0;  // sum of copy powers, watts

  std::uint32_t owner() const { return id.owner; }
  bool fresh() const { return mi_mean == 0.0 && mi_var == 0.0; }
  bool paired_with(const PacketId& other) const;
};

inline bool PacketState::paired_with(const PacketId& other) const {
  for (const auto& p : past_partners)
    if (p == other) return true;
  return false;
}

}  // namespace urllc
