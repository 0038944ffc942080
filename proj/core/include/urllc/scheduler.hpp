#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "urllc/channel.hpp"
#include "urllc/config.hpp"
#include "urllc/noma_solver.hpp"
#include "urllc/packet.hpp"

namespace urllc {

/// What the base station knows when it schedules one uplink phase.
struct PhaseContext {
  std::uint64_t phase_index = 0;
  /// Channel gain of each pending packet's upcoming copy (instantaneous CSI only).
  std::optional<std::map<PacketId, double>> gains;

  double gain(const PacketId& id) const;
};

struct SlotAssignment {
  std::uint32_t slot = 0;
  PacketId first;
  std::optional<PacketId> second;
};

/// Decisions for one uplink phase.
struct ScheduleDecision {
  std::vector<SlotAssignment> slots;
  std::map<PacketId, double> powers;   // watts, for every packet occupying a slot
  std::map<PacketId, double> targets;  // error target of this round (predicted failure probability)
  std::vector<PacketId> postponed;
  std::vector<PacketId> dropped;
  std::uint32_t capacity_drops = 0;   // critical packets dropped for lack of slots
  std::uint32_t deep_fade_drops = 0;  // last-round packets dropped below the fade threshold
  std::uint32_t pair_shortfall = 0;

  bool availability_outage() const { return capacity_drops > 0; }
  std::size_t slots_used() const { return slots.size(); }
};

/// Per-packet single-slot decision computed before any pairing.
struct PacketPlan {
  const PacketState* packet = nullptr;
  double pathloss = 1.0;
  bool critical = false;
  double target = 1.0;        // error target (statistical) or predicted failure probability
  double power = 0.0;         // dedicated-slot power, watts; 0 means postpone
  double postpone_cost = 0.0; // extra expected power caused by skipping this round, watts
  double gain = 0.0;          // known channel gain (instantaneous CSI)
  bool deep_fade = false;     // last round and below the fade threshold
};

struct Classified {
  std::vector<const PacketState*> critical;
  std::vector<const PacketState*> noncritical;
};

/// Splits pending packets into last-round (critical) and the rest.
Classified classify(std::span<const PacketState> buffers, std::uint32_t max_retx);

PacketPlan plan_packet(const PacketState& p, const SystemConfig& cfg, std::span<const UserEquipment> users,
                       const PhaseContext& ctx);

/// Expected extra power caused by skipping the packet's current round.
double postpone_cost(const PacketState& p, const SystemConfig& cfg, std::span<const UserEquipment> users,
                     const PhaseContext& ctx);

/// Number of shared slots to form from T transmitting packets and W slots.
std::uint32_t noma_pair_count(std::uint32_t T, std::uint32_t W, PairingStrategy strategy);

/// Shared-slot allocation for two planned packets; absent when ineligible.
std::optional<PairPowerSolution> pair_solution(const PacketPlan& a, const PacketPlan& b, const SystemConfig& cfg);

/// Extra power of sharing a slot relative to two dedicated slots; absent when ineligible.
std::optional<double> pair_cost(const PacketState& a, const PacketState& b, const SystemConfig& cfg,
                                std::span<const UserEquipment> users, const PhaseContext& ctx);

ScheduleDecision oma_schedule(std::span<const PacketState> buffers, const SystemConfig& cfg,
                              std::span<const UserEquipment> users, const PhaseContext& ctx);
ScheduleDecision noma_schedule(std::span<const PacketState> buffers, const SystemConfig& cfg,
                               std::span<const UserEquipment> users, const PhaseContext& ctx);
/// Dispatches on the access mode.
ScheduleDecision schedule_phase(std::span<const PacketState> buffers, const SystemConfig& cfg,
                                std::span<const UserEquipment> users, const PhaseContext& ctx);

}  // namespace urllc
