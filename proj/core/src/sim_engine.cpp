#include "urllc/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "urllc/harq_math.hpp"
#include "urllc/noma_solver.hpp"

namespace urllc {

std::vector<PacketState> arrivals(std::uint64_t seed, std::uint64_t phase, const SystemConfig& cfg,
                                  std::span<const UserEquipment> users) {
  std::vector<PacketState> out;
  if (cfg.activation_prob <= 0.0) return out;
  for (const auto& u : users) {
    RngStream rng(seed, {phase, StreamPurpose::arrival, u.id});
    if (rng.uniform() >= cfg.activation_prob) continue;
    PacketState p;
    p.id = {phase, u.id};
    p.residual_snr = initial_gamma(cfg.rate);
    p.budget = cfg.target_bler;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::uint64_t round_index(const PacketState& p, const SystemConfig& cfg) {
  return static_cast<std::uint64_t>(p.owner()) * (cfg.max_retx + 1) + p.round;
}

double prior_sinr_sum(const PacketState& p) {
  double total = 0.0;
  for (const auto& c : p.copies)
    if (c.transmit_power > 0.0) total += c.achieved_sinr;
  return total;
}

bool ir(const SystemConfig& cfg) { return cfg.harq_mode == HarqMode::incremental_redundancy; }

double residual_update(const SystemConfig& cfg, double gamma, double sinr) {
  return ir(cfg) ? ir_residual_update(gamma, sinr) : cc_residual_update(gamma, sinr);
}

DecodeOutcome base_outcome(const PacketState& p, double power, double gain, std::uint64_t phase) {
  DecodeOutcome o;
  o.id = p.id;
  o.round = p.round;
  o.transmitted = power > 0.0;
  o.copy.phase_index = phase;
  o.copy.transmit_power = power;
  o.copy.channel_gain = gain;
  o.residual_after = p.residual_snr;
  o.mi_mean_after = p.mi_mean;
  o.mi_var_after = p.mi_var;
  o.mi_realized_after = p.mi_realized;
  return o;
}

// Credits a statistical-CSI copy with the given SINR.
void credit_statistical(DecodeOutcome& o, const PacketState& p, double sinr, const SystemConfig& cfg) {
  o.copy.achieved_sinr = sinr;
  o.residual_after = residual_update(cfg, p.residual_snr, sinr);
  o.success = o.residual_after <= 0.0;
}

// Credits an instantaneous-CSI copy: one Gaussian draw of the information it carried.
void credit_instantaneous(DecodeOutcome& o, const PacketState& p, double sinr, const SystemConfig& cfg,
                          std::uint64_t seed, std::uint64_t phase) {
  o.copy.achieved_sinr = sinr;
  const MiStats add = mi_round_stats(sinr, sinr / (1.0 + sinr), static_cast<int>(cfg.blocklength));
  RngStream rng(seed, {phase, StreamPurpose::mutual_information, round_index(p, cfg)});
  const double increment = add.mean + std::sqrt(add.var) * rng.normal();
  o.mi_mean_after = p.mi_mean + add.mean;
  o.mi_var_after = p.mi_var + add.var;
  o.mi_realized_after = p.mi_realized + increment;
  o.success = o.mi_realized_after >= cfg.rate * std::log(2.0);
}

}  // namespace

double copy_channel_gain(std::uint64_t seed, std::uint64_t phase, const PacketState& p, const SystemConfig& cfg) {
  RngStream rng(seed, {phase, StreamPurpose::channel, round_index(p, cfg)});
  return draw_channel_gain(rng);
}

PhaseContext make_context(std::uint64_t seed, std::uint64_t phase, std::span<const PacketState> pending,
                          const SystemConfig& cfg) {
  PhaseContext ctx;
  ctx.phase_index = phase;
  if (cfg.csi_mode == CsiMode::instantaneous) {
    ctx.gains.emplace();
    for (const auto& p : pending) (*ctx.gains)[p.id] = copy_channel_gain(seed, phase, p, cfg);
  }
  return ctx;
}

DecodeOutcome decode_single(const PacketState& p, double power, double gain, double pathloss,
                            const SystemConfig& cfg, std::uint64_t seed, std::uint64_t phase) {
  DecodeOutcome o = base_outcome(p, power, gain, phase);
  if (!o.transmitted) return o;
  const double sinr = received_snr(power, gain, pathloss, cfg.noise_power);
  if (cfg.csi_mode == CsiMode::instantaneous)
    credit_instantaneous(o, p, sinr, cfg, seed, phase);
  else
    credit_statistical(o, p, sinr, cfg);
  return o;
}

std::pair<DecodeOutcome, DecodeOutcome> decode_pair(const PacketState& a, double power_a, double gain_a,
                                                    double pathloss_a, const PacketState& b, double power_b,
                                                    double gain_b, double pathloss_b, const SystemConfig& cfg,
                                                    std::uint64_t seed, std::uint64_t phase) {
  if (power_a <= 0.0 || power_b <= 0.0) {
    return {decode_single(a, power_a, gain_a, pathloss_a, cfg, seed, phase),
            decode_single(b, power_b, gain_b, pathloss_b, cfg, seed, phase)};
  }
  DecodeOutcome oa = base_outcome(a, power_a, gain_a, phase);
  DecodeOutcome ob = base_outcome(b, power_b, gain_b, phase);
  oa.copy.partner = b.id;
  ob.copy.partner = a.id;
  const double qa = received_snr(power_a, gain_a, pathloss_a, cfg.noise_power);
  const double qb = received_snr(power_b, gain_b, pathloss_b, cfg.noise_power);

  if (cfg.csi_mode == CsiMode::instantaneous) {
    // Stronger signal first; the second sees interference only if the first failed.
    const bool a_first = qa >= qb;
    DecodeOutcome& first = a_first ? oa : ob;
    DecodeOutcome& second = a_first ? ob : oa;
    const PacketState& pf = a_first ? a : b;
    const PacketState& ps = a_first ? b : a;
    const double q1 = a_first ? qa : qb, q2 = a_first ? qb : qa;
    credit_instantaneous(first, pf, q1 / (q2 + 1.0), cfg, seed, phase);
    const double sinr2 = first.success ? q2 : q2 / (q1 + 1.0);
    second.copy.interference_cancelled = first.success;
    credit_instantaneous(second, ps, sinr2, cfg, seed, phase);
    return {oa, ob};
  }

  const bool cc = !ir(cfg);
  const double zeta_a = cc ? 1.0 / (1.0 + prior_sinr_sum(a)) : 1.0;
  const double zeta_b = cc ? 1.0 / (1.0 + prior_sinr_sum(b)) : 1.0;
  const double sa = qa / (zeta_b * qb + 1.0);
  const double sb = qb / (zeta_a * qa + 1.0);
  const bool dec_a = residual_update(cfg, a.residual_snr, sa) <= 0.0;
  const bool dec_b = residual_update(cfg, b.residual_snr, sb) <= 0.0;
  if (dec_a == dec_b) {
    credit_statistical(oa, a, sa, cfg);
    credit_statistical(ob, b, sb, cfg);
  } else if (dec_a) {
    credit_statistical(oa, a, sa, cfg);
    credit_statistical(ob, b, qb, cfg);
    ob.copy.interference_cancelled = true;
  } else {
    credit_statistical(ob, b, sb, cfg);
    credit_statistical(oa, a, qa, cfg);
    oa.copy.interference_cancelled = true;
  }
  return {oa, ob};
}

std::vector<DecodeOutcome> realize_and_decode(const ScheduleDecision& decision, std::span<const PacketState> pending,
                                              const SystemConfig& cfg, std::span<const UserEquipment> users,
                                              std::uint64_t seed, std::uint64_t phase) {
  std::map<PacketId, const PacketState*> index;
  for (const auto& p : pending) index[p.id] = &p;
  auto target = [&](const PacketId& id) {
    const auto it = decision.targets.find(id);
    return it == decision.targets.end() ? 1.0 : it->second;
  };

  std::vector<DecodeOutcome> out;
  out.reserve(decision.slots.size() * 2);
  for (const auto& slot : decision.slots) {
    const PacketState& a = *index.at(slot.first);
    const double pa = decision.powers.at(a.id);
    const double ga = copy_channel_gain(seed, phase, a, cfg);
    if (!slot.second) {
      out.push_back(decode_single(a, pa, ga, users[a.owner()].pathloss, cfg, seed, phase));
      out.back().target = target(a.id);
      continue;
    }
    const PacketState& b = *index.at(*slot.second);
    const double pb = decision.powers.at(b.id);
    const double gb = copy_channel_gain(seed, phase, b, cfg);
    auto [oa, ob] = decode_pair(a, pa, ga, users[a.owner()].pathloss, b, pb, gb, users[b.owner()].pathloss, cfg,
                                seed, phase);
    oa.target = target(a.id);
    ob.target = target(b.id);
    out.push_back(std::move(oa));
    out.push_back(std::move(ob));
  }
  return out;
}

AdvanceResult advance(std::vector<PacketState>& buffers, const ScheduleDecision& decision,
                      std::span<const DecodeOutcome> outcomes, const SystemConfig& cfg) {
  std::map<PacketId, const DecodeOutcome*> by_id;
  for (const auto& o : outcomes) by_id[o.id] = &o;
  const std::set<PacketId> dropped(decision.dropped.begin(), decision.dropped.end());
  const bool statistical = cfg.csi_mode == CsiMode::statistical;

  for (auto& p : buffers) {
    if (p.status != PacketStatus::pending) continue;
    if (dropped.count(p.id)) {
      p.status = PacketStatus::dropped;
      continue;
    }
    const auto it = by_id.find(p.id);
    if (it != by_id.end() && it->second->transmitted) {
      const DecodeOutcome& o = *it->second;
      p.copies.push_back(o.copy);
      p.energy += o.copy.transmit_power;
      if (o.copy.partner && !ir(cfg)) p.past_partners.push_back(*o.copy.partner);
      p.residual_snr = o.residual_after;
      p.mi_mean = o.mi_mean_after;
      p.mi_var = o.mi_var_after;
      p.mi_realized = o.mi_realized_after;
      if (statistical && o.target > 0.0 && o.target < 1.0) p.budget = std::min(p.budget / o.target, 1.0);
      if (o.success) {
        p.status = PacketStatus::delivered;
        continue;
      }
    }
    if (p.round >= cfg.max_retx)
      p.status = PacketStatus::dropped;
    else
      ++p.round;
  }

  AdvanceResult r;
  auto keep = buffers.begin();
  for (auto it = buffers.begin(); it != buffers.end(); ++it) {
    if (it->status == PacketStatus::pending) {
      if (keep != it) *keep = std::move(*it);
      ++keep;
      continue;
    }
    (it->status == PacketStatus::delivered ? r.delivered : r.dropped) += 1;
    r.finished.push_back(std::move(*it));
  }
  buffers.erase(keep, buffers.end());
  return r;
}

Simulation::Simulation(const SystemConfig& cfg, std::uint64_t seed, std::vector<UserEquipment> users)
    : cfg_(cfg), seed_(seed), users_(std::move(users)) {
  cfg_.validate();
}

Simulation::Simulation(const SystemConfig& cfg) : Simulation(cfg, cfg.seed, place_users(cfg, cfg.seed)) {}

PhaseReport Simulation::step(bool spawn) {
  PhaseReport rep;
  rep.phase = phase_;
  if (spawn) {
    auto fresh = arrivals(seed_, phase_, cfg_, users_);
    rep.arrivals = static_cast<std::uint32_t>(fresh.size());
    for (auto& p : fresh) buffers_.push_back(std::move(p));
  }
  const PhaseContext ctx = make_context(seed_, phase_, buffers_, cfg_);
  rep.decision = schedule_phase(buffers_, cfg_, users_, ctx);
  rep.outcomes = realize_and_decode(rep.decision, buffers_, cfg_, users_, seed_, phase_);
  rep.result = advance(buffers_, rep.decision, rep.outcomes, cfg_);
  ++phase_;
  return rep;
}

MetricsLedger run_trial(const SystemConfig& cfg, std::uint64_t seed, std::vector<UserEquipment> users,
                        const PacketObserver& observer) {
  Simulation sim(cfg, seed, std::move(users));
  MetricsLedger ledger;
  const std::uint64_t start = cfg.warmup_phases;
  const std::uint64_t stop = start + cfg.n_phases;
  const std::uint64_t end = stop + cfg.max_retx + 1;
  auto measured = [&](const PacketId& id) { return id.birth_phase >= start && id.birth_phase < stop; };
  std::vector<int> zone(sim.users().size());
  for (const auto& u : sim.users()) zone[u.id] = distance_zone(u.distance, cfg.dist_min, cfg.dist_max);

  for (std::uint64_t ph = 0; ph < end; ++ph) {
    const PhaseReport rep = sim.step(true);
    if (ph >= start && ph < stop) {
      ledger.arrivals += rep.arrivals;
      ledger.capacity_drops += rep.decision.capacity_drops;
      ledger.deep_fade_drops += rep.decision.deep_fade_drops;
      ledger.record_phase(rep.result.delivered, rep.decision.slots_used(), rep.decision.availability_outage());
    }
    for (const auto& o : rep.outcomes)
      if (o.transmitted && measured(o.id)) ledger.record_attempt(o.round, o.target, !o.success);
    for (const auto& p : rep.result.finished) {
      if (!measured(p.id)) continue;
      (p.status == PacketStatus::delivered ? ledger.delivered : ledger.dropped) += 1;
      ledger.record_packet(p.energy, zone[p.owner()], p.status == PacketStatus::delivered);
      if (observer) observer(p);
    }
  }
  return ledger;
}

MetricsLedger run(const SystemConfig& cfg, const PacketObserver& observer) {
  return run_trial(cfg, cfg.seed, place_users(cfg, cfg.seed), observer);
}

}  // namespace urllc
