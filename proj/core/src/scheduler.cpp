#include "urllc/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urllc/fbl_optimizer.hpp"
#include "urllc/harq_math.hpp"
#include "urllc/matching.hpp"
#include "urllc/target_optimizer.hpp"

namespace urllc {

double PhaseContext::gain(const PacketId& id) const {
  if (!gains) throw std::logic_error("channel gains are only known with instantaneous CSI");
  const auto it = gains->find(id);
  if (it == gains->end()) throw std::out_of_range("no channel gain recorded for packet");
  return it->second;
}

Classified classify(std::span<const PacketState> buffers, std::uint32_t max_retx) {
  Classified c;
  for (const auto& p : buffers) {
    if (p.status != PacketStatus::pending) continue;
    (p.round >= max_retx ? c.critical : c.noncritical).push_back(&p);
  }
  return c;
}

namespace {

CurveKey curve_key(const SystemConfig& cfg, std::uint32_t remaining) {
  return CurveKey{remaining, cfg.rate, cfg.blocklength, cfg.target_bler, cfg.drop_threshold};
}

std::vector<double> prior_sinrs(const PacketState& p) {
  std::vector<double> out;
  for (const auto& c : p.copies)
    if (c.transmit_power > 0.0) out.push_back(c.achieved_sinr);
  return out;
}

PacketPlan plan_statistical(const PacketState& p, const SystemConfig& cfg, double pathloss) {
  PacketPlan plan;
  plan.packet = &p;
  plan.pathloss = pathloss;
  plan.critical = p.round >= cfg.max_retx;
  const std::uint32_t remaining = cfg.max_retx - std::min(p.round, cfg.max_retx);
  plan.target = round_target(cfg.harq_mode, cfg.rate, p.residual_snr, p.budget, remaining);
  plan.power = plan.target < 1.0 ? power_for_target(p.residual_snr, plan.target, pathloss, cfg.noise_power) : 0.0;
  if (!plan.critical)
    plan.postpone_cost = expected_oma_power(p, cfg, pathloss, true) - expected_oma_power(p, cfg, pathloss, false);
  return plan;
}

PacketPlan plan_instantaneous(const PacketState& p, const SystemConfig& cfg, double pathloss, double gain) {
  PacketPlan plan;
  plan.packet = &p;
  plan.pathloss = pathloss;
  plan.gain = gain;
  plan.critical = p.round >= cfg.max_retx;
  const std::uint32_t remaining = cfg.max_retx - std::min(p.round, cfg.max_retx);
  const double scale = pathloss * cfg.noise_power;
  const double fade = deep_fade_gain(cfg.drop_threshold);
  if (remaining == 0) {
    if (gain < fade) {
      plan.deep_fade = true;
      return plan;
    }
    const double rho = last_round_snr(p.mi_mean, p.mi_var, cfg.rate, cfg.blocklength, cfg.target_bler);
    plan.power = rho * scale / gain;
    plan.target = plan.power > 0.0 ? fbl_round_error(cfg.rate, p.mi_mean, p.mi_var,
                                                     mi_round_stats(rho, rho / (1.0 + rho), cfg.blocklength))
                                   : 1.0;
    return plan;
  }
  double cost, skip;
  if (remaining == 1 && !p.fresh()) {
    const auto r = penultimate_plan(gain, p.mi_mean, p.mi_var, cfg.rate, cfg.blocklength, cfg.target_bler,
                                    cfg.drop_threshold);
    plan.power = r.power * scale;
    plan.target = r.error;
    cost = r.cost;
    skip = expected_last_round_cost(p.mi_mean, p.mi_var, cfg.rate, cfg.blocklength, cfg.target_bler,
                                    cfg.drop_threshold);
  } else {
    const auto& curve = power_curve(curve_key(cfg, remaining));
    plan.power = curve_power(curve, gain) * scale;
    plan.target = curve_error(curve, gain);
    cost = curve_cost(curve, gain);
    skip = curve.postpone_value;
  }
  plan.postpone_cost = std::max(skip - cost, 0.0) * scale;
  return plan;
}

bool by_required_power(const PacketPlan* a, const PacketPlan* b) {
  if (a->power != b->power) return a->power < b->power;
  return a->packet->id < b->packet->id;
}

bool by_postpone_cost(const PacketPlan* a, const PacketPlan* b) {
  if (a->postpone_cost != b->postpone_cost) return a->postpone_cost > b->postpone_cost;
  return a->packet->id < b->packet->id;
}

struct Candidates {
  std::vector<PacketPlan> plans;
  std::vector<const PacketPlan*> critical;
  std::vector<const PacketPlan*> noncritical;
};

// Plans every pending packet and applies the decisions that do not depend on
// capacity: deep-fade drops and zero-power postponements.
Candidates prepare(std::span<const PacketState> buffers, const SystemConfig& cfg,
                   std::span<const UserEquipment> users, const PhaseContext& ctx, ScheduleDecision& d) {
  Candidates c;
  c.plans.reserve(buffers.size());
  for (const auto& p : buffers)
    if (p.status == PacketStatus::pending) c.plans.push_back(plan_packet(p, cfg, users, ctx));
  for (const auto& plan : c.plans) {
    if (plan.critical) {
      if (plan.deep_fade) {
        d.dropped.push_back(plan.packet->id);
        ++d.deep_fade_drops;
      } else if (plan.power <= 0.0) {
        d.dropped.push_back(plan.packet->id);
      } else {
        c.critical.push_back(&plan);
      }
    } else if (plan.power <= 0.0) {
      d.postponed.push_back(plan.packet->id);
    } else {
      c.noncritical.push_back(&plan);
    }
  }
  std::sort(c.critical.begin(), c.critical.end(), by_required_power);
  std::sort(c.noncritical.begin(), c.noncritical.end(), by_postpone_cost);
  return c;
}

// Chooses at most `capacity` packets: critical ones first (cheapest kept), then
// noncritical ones by decreasing postpone cost.
std::vector<const PacketPlan*> admit(const Candidates& c, std::size_t capacity, ScheduleDecision& d) {
  std::vector<const PacketPlan*> chosen;
  for (std::size_t i = 0; i < c.critical.size(); ++i) {
    if (i < capacity) {
      chosen.push_back(c.critical[i]);
    } else {
      d.dropped.push_back(c.critical[i]->packet->id);
      ++d.capacity_drops;
    }
  }
  for (const auto* plan : c.noncritical) {
    if (chosen.size() < capacity)
      chosen.push_back(plan);
    else
      d.postponed.push_back(plan->packet->id);
  }
  return chosen;
}

void assign_single(const PacketPlan& plan, ScheduleDecision& d) {
  d.slots.push_back({static_cast<std::uint32_t>(d.slots.size()), plan.packet->id, std::nullopt});
  d.powers[plan.packet->id] = plan.power;
  d.targets[plan.packet->id] = plan.target;
}

}  // namespace

PacketPlan plan_packet(const PacketState& p, const SystemConfig& cfg, std::span<const UserEquipment> users,
                       const PhaseContext& ctx) {
  const double pathloss = users[p.owner()].pathloss;
  if (cfg.csi_mode == CsiMode::instantaneous) return plan_instantaneous(p, cfg, pathloss, ctx.gain(p.id));
  return plan_statistical(p, cfg, pathloss);
}

double postpone_cost(const PacketState& p, const SystemConfig& cfg, std::span<const UserEquipment> users,
                     const PhaseContext& ctx) {
  if (p.round >= cfg.max_retx) return 0.0;
  return plan_packet(p, cfg, users, ctx).postpone_cost;
}

std::uint32_t noma_pair_count(std::uint32_t T, std::uint32_t W, PairingStrategy strategy) {
  const std::uint32_t want = strategy == PairingStrategy::power_conservative ? (T > W ? T - W : 0) : T / 2;
  return std::min(want, W);
}

std::optional<PairPowerSolution> pair_solution(const PacketPlan& a, const PacketPlan& b, const SystemConfig& cfg) {
  const PacketState& pa = *a.packet;
  const PacketState& pb = *b.packet;
  if (pa.owner() == pb.owner()) return std::nullopt;
  if (cfg.harq_mode == HarqMode::chase_combining && (pa.paired_with(pb.id) || pb.paired_with(pa.id)))
    return std::nullopt;
  PairPowerSolution s;
  if (cfg.csi_mode == CsiMode::instantaneous) {
    const FblUser ua{a.gain, a.pathloss, pa.mi_mean, pa.mi_var, a.power, a.target};
    const FblUser ub{b.gain, b.pathloss, pb.mi_mean, pb.mi_var, b.power, b.target};
    s = fbl_joint_power_min(ua, ub, cfg.rate, static_cast<int>(cfg.blocklength), cfg.noise_power);
  } else {
    const bool cc = cfg.harq_mode == HarqMode::chase_combining;
    const auto sa = prior_sinrs(pa), sb = prior_sinrs(pb);
    const PairUser ua{pa.residual_snr, a.target, a.pathloss, cc ? interference_reduction(sa) : 1.0};
    const PairUser ub{pb.residual_snr, b.target, b.pathloss, cc ? interference_reduction(sb) : 1.0};
    s = joint_power_min(ua, ub, cfg.noise_power);
  }
  if (!s.feasible) return std::nullopt;
  return s;
}

std::optional<double> pair_cost(const PacketState& a, const PacketState& b, const SystemConfig& cfg,
                                std::span<const UserEquipment> users, const PhaseContext& ctx) {
  const auto pa = plan_packet(a, cfg, users, ctx);
  const auto pb = plan_packet(b, cfg, users, ctx);
  const auto s = pair_solution(pa, pb, cfg);
  if (!s) return std::nullopt;
  return s->extra_cost;
}

ScheduleDecision oma_schedule(std::span<const PacketState> buffers, const SystemConfig& cfg,
                              std::span<const UserEquipment> users, const PhaseContext& ctx) {
  ScheduleDecision d;
  const Candidates c = prepare(buffers, cfg, users, ctx, d);
  for (const auto* plan : admit(c, cfg.n_slots_per_phase, d)) assign_single(*plan, d);
  return d;
}

ScheduleDecision noma_schedule(std::span<const PacketState> buffers, const SystemConfig& cfg,
                               std::span<const UserEquipment> users, const PhaseContext& ctx) {
  ScheduleDecision d;
  const Candidates c = prepare(buffers, cfg, users, ctx, d);
  const std::uint32_t W = cfg.n_slots_per_phase;
  std::vector<const PacketPlan*> chosen = admit(c, 2 * static_cast<std::size_t>(W), d);
  const auto n = static_cast<std::uint32_t>(chosen.size());
  const std::uint32_t q = noma_pair_count(n, W, cfg.pairing_strategy);

  std::vector<PairEdge> edges;
  std::map<std::pair<std::uint32_t, std::uint32_t>, PairPowerSolution> solutions;
  if (q > 0) {
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j)
        if (auto s = pair_solution(*chosen[i], *chosen[j], cfg)) {
          edges.push_back({i, j, s->extra_cost});
          solutions.emplace(std::make_pair(i, j), *s);
        }
  }
  const Matching m = select_pairs(n, edges, q);
  d.pair_shortfall = m.shortfall;

  std::vector<bool> paired(n, false);
  for (const auto& [i, j] : m.pairs) paired[i] = paired[j] = true;
  std::vector<const PacketPlan*> singles;
  for (std::uint32_t i = 0; i < n; ++i)
    if (!paired[i]) singles.push_back(chosen[i]);

  // A pairing shortfall can leave more singles than free slots: give up the
  // cheapest-to-postpone noncritical packets first, then the most expensive critical ones.
  const std::size_t free_slots = W - m.pairs.size();
  if (singles.size() > free_slots) {
    std::size_t excess = singles.size() - free_slots;
    std::vector<const PacketPlan*> non, crit;
    for (const auto* s : singles) (s->critical ? crit : non).push_back(s);
    std::sort(non.begin(), non.end(), by_postpone_cost);
    std::sort(crit.begin(), crit.end(), by_required_power);
    while (excess > 0 && !non.empty()) {
      d.postponed.push_back(non.back()->packet->id);
      non.pop_back();
      --excess;
    }
    while (excess > 0 && !crit.empty()) {
      d.dropped.push_back(crit.back()->packet->id);
      ++d.capacity_drops;
      crit.pop_back();
      --excess;
    }
    singles = crit;
    singles.insert(singles.end(), non.begin(), non.end());
  }

  for (const auto& [i, j] : m.pairs) {
    const auto& s = solutions.at({i, j});
    const PacketId a = chosen[i]->packet->id, b = chosen[j]->packet->id;
    d.slots.push_back({static_cast<std::uint32_t>(d.slots.size()), a, b});
    d.powers[a] = s.power_a;
    d.powers[b] = s.power_b;
    d.targets[a] = chosen[i]->target;
    d.targets[b] = chosen[j]->target;
  }
  for (const auto* plan : singles) assign_single(*plan, d);
  return d;
}

ScheduleDecision schedule_phase(std::span<const PacketState> buffers, const SystemConfig& cfg,
                                std::span<const UserEquipment> users, const PhaseContext& ctx) {
  return cfg.access_mode == AccessMode::noma ? noma_schedule(buffers, cfg, users, ctx)
                                             : oma_schedule(buffers, cfg, users, ctx);
}

}  // namespace urllc
