#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace urllc {

/// Running count, sum and sum of squares; merges associatively.
struct MeanAccumulator {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x);
  void merge(const MeanAccumulator& o);
  double mean() const;
  /// Standard error of the mean (0 with fewer than two samples).
  double se() const;

  bool operator==(const MeanAccumulator&) const = default;
};

/// Outcome counts of transmissions made in one HARQ round.
struct RoundCounters {
  std::uint64_t attempts = 0;
  std::uint64_t failures = 0;
  double target_sum = 0.0;       // sum of per-attempt error targets
  double target_variance = 0.0;  // sum of t (1 - t)

  bool operator==(const RoundCounters&) const = default;
};

inline constexpr int kZones = 3;

/// Accumulators behind every reported metric. Packet quantities cover packets
/// born in the measured window; slot quantities cover measured phases.
struct MetricsLedger {
  std::uint64_t phases_observed = 0;
  std::uint64_t outage_phases = 0;
  std::uint64_t slots_used = 0;
  std::uint64_t decoded_in_window = 0;  // packets decoded during measured phases

  std::uint64_t arrivals = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t capacity_drops = 0;
  std::uint64_t deep_fade_drops = 0;

  /// Energy (sum of copy powers, watts) per packet and distance zone.
  std::array<MeanAccumulator, kZones> energy_all{};
  std::array<MeanAccumulator, kZones> energy_delivered{};
  double total_energy = 0.0;

  /// Per-phase (decoded, slots) moments for the utilization ratio estimator.
  double util_d = 0.0, util_s = 0.0, util_dd = 0.0, util_ss = 0.0, util_ds = 0.0;

  std::vector<RoundCounters> rounds;

  void record_phase(std::uint64_t decoded, std::uint64_t slots, bool outage);
  void record_packet(double energy, int zone, bool delivered);
  void record_attempt(std::uint32_t round, double target, bool failed);
  void merge(const MetricsLedger& o);

  bool operator==(const MetricsLedger&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

double availability_outage(const MetricsLedger& m);
Interval availability_outage_ci(const MetricsLedger& m);

/// Mean energy per packet in watts, over all zones or one zone. With
/// `delivered_only`, dropped packets are excluded. Absent for an empty selection.
std::optional<double> avg_power_per_packet(const MetricsLedger& m, std::optional<int> zone = std::nullopt,
                                           bool delivered_only = false);
/// Standard error of avg_power_per_packet expressed in dB.
std::optional<double> avg_power_se_db(const MetricsLedger& m, bool delivered_only = false);

double slot_utilization(const MetricsLedger& m);
/// Normal-approximation 95% interval of the utilization ratio estimator.
Interval slot_utilization_ci(const MetricsLedger& m);
double spectral_efficiency(const MetricsLedger& m, double rate);
/// Fraction of measured packets that were not delivered.
double loss_rate(const MetricsLedger& m);

}  // namespace urllc
