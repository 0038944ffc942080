#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "urllc/channel.hpp"
#include "urllc/config.hpp"
#include "urllc/metrics.hpp"
#include "urllc/packet.hpp"
#include "urllc/scheduler.hpp"

namespace urllc {

/// New round-0 packets of one phase: each user spawns one with the activation probability.
std::vector<PacketState> arrivals(std::uint64_t seed, std::uint64_t phase, const SystemConfig& cfg,
                                  std::span<const UserEquipment> users);

/// Gain of the copy a packet sends in `phase`. The same draw serves scheduling
/// (instantaneous CSI) and decoding.
double copy_channel_gain(std::uint64_t seed, std::uint64_t phase, const PacketState& p, const SystemConfig& cfg);

/// Builds the scheduler's view of a phase; gains are filled in under instantaneous CSI.
PhaseContext make_context(std::uint64_t seed, std::uint64_t phase, std::span<const PacketState> pending,
                          const SystemConfig& cfg);

/// Result of one transmitted (or zero-power) copy.
struct DecodeOutcome {
  PacketId id;
  std::uint32_t round = 0;
  bool transmitted = false;  // false for a zero-power slot entry
  bool success = false;
  double target = 1.0;
  CopyRecord copy;
  double residual_after = 0.0;
  double mi_mean_after = 0.0;
  double mi_var_after = 0.0;
  double mi_realized_after = 0.0;
};

DecodeOutcome decode_single(const PacketState& p, double power, double gain, double pathloss,
                            const SystemConfig& cfg, std::uint64_t seed, std::uint64_t phase);
std::pair<DecodeOutcome, DecodeOutcome> decode_pair(const PacketState& a, double power_a, double gain_a,
                                                    double pathloss_a, const PacketState& b, double power_b,
                                                    double gain_b, double pathloss_b, const SystemConfig& cfg,
                                                    std::uint64_t seed, std::uint64_t phase);

/// Draws channels and decides every occupied slot of a phase.
std::vector<DecodeOutcome> realize_and_decode(const ScheduleDecision& decision, std::span<const PacketState> pending,
                                              const SystemConfig& cfg, std::span<const UserEquipment> users,
                                              std::uint64_t seed, std::uint64_t phase);

struct AdvanceResult {
  std::vector<PacketState> finished;  // delivered or dropped this phase
  std::uint32_t delivered = 0;
  std::uint32_t dropped = 0;
};

/// Applies outcomes and scheduler decisions; finished packets leave `buffers`.
AdvanceResult advance(std::vector<PacketState>& buffers, const ScheduleDecision& decision,
                      std::span<const DecodeOutcome> outcomes, const SystemConfig& cfg);

struct PhaseReport {
  std::uint64_t phase = 0;
  std::uint32_t arrivals = 0;
  ScheduleDecision decision;
  std::vector<DecodeOutcome> outcomes;
  AdvanceResult result;
};

/// One trial: a fixed user population evolving phase by phase.
class Simulation {
 public:
  Simulation(const SystemConfig& cfg, std::uint64_t seed, std::vector<UserEquipment> users);
  /// Users placed from cfg.seed, randomness from cfg.seed.
  explicit Simulation(const SystemConfig& cfg);

  PhaseReport step(bool spawn = true);

  std::uint64_t phase() const { return phase_; }
  std::span<const PacketState> pending() const { return buffers_; }
  std::span<const UserEquipment> users() const { return users_; }
  const SystemConfig& config() const { return cfg_; }

 private:
  SystemConfig cfg_;
  std::uint64_t seed_;
  std::vector<UserEquipment> users_;
  std::vector<PacketState> buffers_;
  std::uint64_t phase_ = 0;
};

using PacketObserver = std::function<void(const PacketState&)>;

/// Warmup, `n_phases` measured phases, then enough phases to resolve every
/// measured packet. Packet metrics cover packets born in the measured window.
MetricsLedger run_trial(const SystemConfig& cfg, std::uint64_t seed, std::vector<UserEquipment> users,
                        const PacketObserver& observer = {});
/// run_trial with users and randomness taken from cfg.seed.
MetricsLedger run(const SystemConfig& cfg, const PacketObserver& observer = {});

}  // namespace urllc
