#include "urllc/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace urllc {

void MeanAccumulator::add(double x) {
  ++n;
  sum += x;
  sumsq += x * x;
}

void MeanAccumulator::merge(const MeanAccumulator& o) {
  n += o.n;
  sum += o.sum;
  sumsq += o.sumsq;
}

double MeanAccumulator::mean() const { return n ? sum / n : 0.0; }

double MeanAccumulator::se() const {
  if (n < 2) return 0.0;
  const double m = mean();
  const double var = std::max(sumsq / n - m * m, 0.0) * n / (n - 1);
  return std::sqrt(var / n);
}

void MetricsLedger::record_phase(std::uint64_t decoded, std::uint64_t slots, bool outage) {
  ++phases_observed;
  outage_phases += outage ? 1 : 0;
  slots_used += slots;
  decoded_in_window += decoded;
  const double d = static_cast<double>(decoded), s = static_cast<double>(slots);
  util_d += d;
  util_s += s;
  util_dd += d * d;
  util_ss += s * s;
  util_ds += d * s;
}

void MetricsLedger::record_packet(double energy, int zone, bool was_delivered) {
  const auto z = static_cast<std::size_t>(std::clamp(zone, 0, kZones - 1));
  energy_all[z].add(energy);
  if (was_delivered) energy_delivered[z].add(energy);
  total_energy += energy;
}

void MetricsLedger::record_attempt(std::uint32_t round, double target, bool failed) {
  if (rounds.size() <= round) rounds.resize(round + 1);
  auto& r = rounds[round];
  ++r.attempts;
  r.failures += failed ? 1 : 0;
  r.target_sum += target;
  r.target_variance += target * (1.0 - target);
}

void MetricsLedger::merge(const MetricsLedger& o) {
  phases_observed += o.phases_observed;
  outage_phases += o.outage_phases;
  slots_used += o.slots_used;
  decoded_in_window += o.decoded_in_window;
  arrivals += o.arrivals;
  delivered += o.delivered;
  dropped += o.dropped;
  capacity_drops += o.capacity_drops;
  deep_fade_drops += o.deep_fade_drops;
  for (int z = 0; z < kZones; ++z) {
    energy_all[z].merge(o.energy_all[z]);
    energy_delivered[z].merge(o.energy_delivered[z]);
  }
  total_energy += o.total_energy;
  util_d += o.util_d;
  util_s += o.util_s;
  util_dd += o.util_dd;
  util_ss += o.util_ss;
  util_ds += o.util_ds;
  if (rounds.size() < o.rounds.size()) rounds.resize(o.rounds.size());
  for (std::size_t i = 0; i < o.rounds.size(); ++i) {
    rounds[i].attempts += o.rounds[i].attempts;
    rounds[i].failures += o.rounds[i].failures;
    rounds[i].target_sum += o.rounds[i].target_sum;
    rounds[i].target_variance += o.rounds[i].target_variance;
  }
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = k / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k == 0 ? 0.0 : std::max(center - half, 0.0), k == n ? 1.0 : std::min(center + half, 1.0)};
}

double availability_outage(const MetricsLedger& m) {
  return m.phases_observed ? static_cast<double>(m.outage_phases) / m.phases_observed : 0.0;
}

Interval availability_outage_ci(const MetricsLedger& m) { return wilson_interval(m.outage_phases, m.phases_observed); }

namespace {

MeanAccumulator pooled(const MetricsLedger& m, std::optional<int> zone, bool delivered_only) {
  const auto& acc = delivered_only ? m.energy_delivered : m.energy_all;
  if (zone) return acc[static_cast<std::size_t>(std::clamp(*zone, 0, kZones - 1))];
  MeanAccumulator total;
  for (const auto& a : acc) total.merge(a);
  return total;
}

}  // namespace

std::optional<double> avg_power_per_packet(const MetricsLedger& m, std::optional<int> zone, bool delivered_only) {
  const auto acc = pooled(m, zone, delivered_only);
  if (acc.n == 0) return std::nullopt;
  return acc.mean();
}

std::optional<double> avg_power_se_db(const MetricsLedger& m, bool delivered_only) {
  const auto acc = pooled(m, std::nullopt, delivered_only);
  if (acc.n == 0 || acc.mean() <= 0.0) return std::nullopt;
  return 10.0 / std::log(10.0) * acc.se() / acc.mean();
}

double slot_utilization(const MetricsLedger& m) { return m.util_s > 0.0 ? m.util_d / m.util_s : 0.0; }

Interval slot_utilization_ci(const MetricsLedger& m) {
  const double n = static_cast<double>(m.phases_observed);
  if (n < 2 || m.util_s <= 0.0) return {0.0, 0.0};
  const double r = m.util_d / m.util_s;
  const double sbar = m.util_s / n;
  // Residual variance of d_i - r s_i around zero.
  const double ss = m.util_dd - 2.0 * r * m.util_ds + r * r * m.util_ss;
  const double var = std::max(ss, 0.0) / (n - 1.0);
  const double se = std::sqrt(var / n) / sbar;
  return {std::max(r - 1.959963984540054 * se, 0.0), r + 1.959963984540054 * se};
}

double spectral_efficiency(const MetricsLedger& m, double rate) { return slot_utilization(m) * rate; }

double loss_rate(const MetricsLedger& m) {
  return m.arrivals ? static_cast<double>(m.arrivals - m.delivered) / m.arrivals : 0.0;
}

}  // namespace urllc
