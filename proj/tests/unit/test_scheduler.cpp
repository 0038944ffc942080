#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "urllc/channel.hpp"
#include "urllc/harq_math.hpp"
#include "urllc/scheduler.hpp"
#include "urllc/sim_engine.hpp"

using namespace urllc;

namespace {

std::vector<UserEquipment> line_of_users(std::uint32_t n, double d0 = 20.0, double step = 5.0) {
  std::vector<UserEquipment> users;
  for (std::uint32_t i = 0; i < n; ++i) users.push_back(make_user(i, d0 + step * i, 2.0));
  return users;
}

PacketState fresh(std::uint32_t owner, const SystemConfig& cfg, std::uint64_t birth = 0) {
  PacketState p;
  p.id = {birth, owner};
  p.residual_snr = initial_gamma(cfg.rate);
  p.budget = cfg.target_bler;
  return p;
}

// A packet in its last round after two failed copies at moderate SINR.
PacketState critical(std::uint32_t owner, const SystemConfig& cfg) {
  PacketState p = fresh(owner, cfg);
  p.round = cfg.max_retx;
  p.residual_snr = initial_gamma(cfg.rate) * 0.6;
  p.budget = 1e-3;
  return p;
}

std::multiset<PacketId> scheduled(const ScheduleDecision& d) {
  std::multiset<PacketId> ids;
  for (const auto& s : d.slots) {
    ids.insert(s.first);
    if (s.second) ids.insert(*s.second);
  }
  return ids;
}

}  // namespace

TEST(Classify, SplitsOnLastRound) {
  SystemConfig cfg;
  std::vector<PacketState> b{fresh(0, cfg), critical(1, cfg), fresh(2, cfg)};
  b[2].round = 1;
  PacketState done = fresh(3, cfg);
  done.status = PacketStatus::delivered;
  b.push_back(done);
  const auto c = classify(b, cfg.max_retx);
  ASSERT_EQ(c.critical.size(), 1u);
  EXPECT_EQ(c.critical[0]->owner(), 1u);
  EXPECT_EQ(c.noncritical.size(), 2u);
}

TEST(PairCount, Strategies) {
  EXPECT_EQ(noma_pair_count(12, 10, PairingStrategy::power_conservative), 2u);
  EXPECT_EQ(noma_pair_count(12, 10, PairingStrategy::resource_conservative), 6u);
  EXPECT_EQ(noma_pair_count(25, 10, PairingStrategy::resource_conservative), 10u);
  EXPECT_EQ(noma_pair_count(25, 10, PairingStrategy::power_conservative), 10u);
  EXPECT_EQ(noma_pair_count(8, 10, PairingStrategy::power_conservative), 0u);
  EXPECT_EQ(noma_pair_count(0, 10, PairingStrategy::resource_conservative), 0u);
}

TEST(OmaSchedule, EverythingFitsWhenBelowCapacity) {
  SystemConfig cfg;
  const auto users = line_of_users(cfg.n_users);
  std::vector<PacketState> b;
  for (std::uint32_t i = 0; i < cfg.n_slots_per_phase; ++i) b.push_back(fresh(i, cfg));
  const auto d = oma_schedule(b, cfg, users, {});
  EXPECT_EQ(d.slots_used(), cfg.n_slots_per_phase);
  EXPECT_TRUE(d.postponed.empty());
  EXPECT_TRUE(d.dropped.empty());
  for (const auto& p : b) {
    EXPECT_NEAR(d.powers.at(p.id),
                power_for_target(p.residual_snr, d.targets.at(p.id), users[p.owner()].pathloss, cfg.noise_power),
                1e-12 * d.powers.at(p.id));
  }
}

TEST(OmaSchedule, DropsMostExpensiveCriticalPackets) {
  SystemConfig cfg;
  const auto users = line_of_users(cfg.n_users);
  std::vector<PacketState> b;
  for (std::uint32_t i = 0; i < 12; ++i) b.push_back(critical(i, cfg));
  const auto d = oma_schedule(b, cfg, users, {});
  EXPECT_EQ(d.slots_used(), 10u);
  EXPECT_EQ(d.capacity_drops, 2u);
  EXPECT_TRUE(d.availability_outage());
  // Identical states, so the farthest users need the most power.
  const std::set<std::uint32_t> dropped{d.dropped[0].owner, d.dropped[1].owner};
  EXPECT_EQ(dropped, (std::set<std::uint32_t>{10, 11}));
}

TEST(OmaSchedule, PostponesCheapestToDefer) {
  SystemConfig cfg;
  cfg.n_slots_per_phase = 3;
  const auto users = line_of_users(cfg.n_users);
  std::vector<PacketState> b;
  for (std::uint32_t i = 0; i < 5; ++i) b.push_back(fresh(i, cfg));
  const auto d = oma_schedule(b, cfg, users, {});
  ASSERT_EQ(d.postponed.size(), 2u);
  EXPECT_EQ(d.capacity_drops, 0u);
  // Postpone cost grows with pathloss: the two nearest users wait.
  const std::set<std::uint32_t> waiting{d.postponed[0].owner, d.postponed[1].owner};
  EXPECT_EQ(waiting, (std::set<std::uint32_t>{0, 1}));
}

TEST(PostponeCost, NonNegativeAndProportionalToPathloss) {
  SystemConfig cfg;
  const auto users = line_of_users(cfg.n_users);
  const double c0 = postpone_cost(fresh(0, cfg), cfg, users, {});
  const double c4 = postpone_cost(fresh(4, cfg), cfg, users, {});
  EXPECT_GT(c0, 0.0);
  EXPECT_NEAR(c4 / c0, users[4].pathloss / users[0].pathloss, 1e-9);
  EXPECT_EQ(postpone_cost(critical(0, cfg), cfg, users, {}), 0.0);
  PacketState mid = fresh(2, cfg);
  mid.round = 1;
  mid.residual_snr *= 0.5;
  mid.budget = 1e-4;
  EXPECT_GE(postpone_cost(mid, cfg, users, {}), 0.0);
}

TEST(NomaSchedule, PowerConservativeBelowCapacityMatchesOma) {
  SystemConfig cfg;
  cfg.access_mode = AccessMode::noma;
  const auto users = line_of_users(cfg.n_users);
  std::vector<PacketState> b;
  for (std::uint32_t i = 0; i < 8; ++i) b.push_back(fresh(i, cfg));
  const auto n = noma_schedule(b, cfg, users, {});
  const auto o = oma_schedule(b, cfg, users, {});
  EXPECT_EQ(n.slots_used(), o.slots_used());
  EXPECT_EQ(n.powers, o.powers);
  for (const auto& s : n.slots) EXPECT_FALSE(s.second.has_value());
}

TEST(NomaSchedule, PowerConservativeFormsJustEnoughPairs) {
  SystemConfig cfg;
  cfg.access_mode = AccessMode::noma;
  const auto users = line_of_users(cfg.n_users, 20.0, 3.0);
  std::vector<PacketState> b;
  for (std::uint32_t i = 0; i < 13; ++i) b.push_back(fresh(i, cfg));
  const auto d = noma_schedule(b, cfg, users, {});
  EXPECT_EQ(d.slots_used(), 10u);
  int pairs = 0;
  for (const auto& s : d.slots) pairs += s.second ? 1 : 0;
  EXPECT_EQ(pairs, 3);
  EXPECT_EQ(scheduled(d).size(), 13u);
  EXPECT_TRUE(d.postponed.empty());

  cfg.pairing_strategy = PairingStrategy::resource_conservative;
  const auto r = noma_schedule(b, cfg, users, {});
  int rc_pairs = 0;
  for (const auto& s : r.slots) rc_pairs += s.second ? 1 : 0;
  EXPECT_EQ(rc_pairs, 6);
  EXPECT_EQ(r.slots_used(), 7u);
}

TEST(PairEligibility, SameOwnerAndPastPartners) {
  SystemConfig cfg;
  const auto users = line_of_users(cfg.n_users);
  const PacketState a = fresh(0, cfg, 0), same_owner = fresh(0, cfg, 1);
  EXPECT_FALSE(pair_cost(a, same_owner, cfg, users, {}).has_value());

  PacketState x = fresh(1, cfg), y = fresh(5, cfg);
  ASSERT_TRUE(pair_cost(x, y, cfg, users, {}).has_value());
  EXPECT_GE(*pair_cost(x, y, cfg, users, {}), 0.0);
  x.past_partners.push_back(y.id);
  EXPECT_FALSE(pair_cost(x, y, cfg, users, {}).has_value());
  EXPECT_FALSE(pair_cost(y, x, cfg, users, {}).has_value());
  cfg.harq_mode = HarqMode::incremental_redundancy;
  EXPECT_TRUE(pair_cost(x, y, cfg, users, {}).has_value());
}

namespace {

void check_decision(const ScheduleDecision& d, std::span<const PacketState> pending, const SystemConfig& cfg) {
  ASSERT_LE(d.slots_used(), cfg.n_slots_per_phase);
  std::multiset<PacketId> seen = scheduled(d);
  for (const auto& id : d.postponed) seen.insert(id);
  for (const auto& id : d.dropped) seen.insert(id);
  std::multiset<PacketId> expected;
  for (const auto& p : pending) expected.insert(p.id);
  ASSERT_EQ(seen, expected);
  for (const auto& s : d.slots) {
    ASSERT_TRUE(d.powers.count(s.first));
    if (s.second) {
      const auto& a = *std::find_if(pending.begin(), pending.end(), [&](auto& p) { return p.id == s.first; });
      const auto& b = *std::find_if(pending.begin(), pending.end(), [&](auto& p) { return p.id == *s.second; });
      EXPECT_NE(a.owner(), b.owner());
      if (cfg.harq_mode == HarqMode::chase_combining) EXPECT_FALSE(a.paired_with(b.id));
    }
  }
  // Critical packets are only dropped when every slot is taken or they cannot be served.
  if (d.capacity_drops > 0) EXPECT_EQ(d.slots_used(), cfg.n_slots_per_phase);
}

}  // namespace

TEST(ScheduleInvariants, CapacityAndCoverageUnderLoad) {
  struct Case {
    AccessMode access;
    PairingStrategy strategy;
    HarqMode harq;
    CsiMode csi;
  };
  const Case cases[] = {
      {AccessMode::oma, PairingStrategy::power_conservative, HarqMode::chase_combining, CsiMode::statistical},
      {AccessMode::noma, PairingStrategy::power_conservative, HarqMode::chase_combining, CsiMode::statistical},
      {AccessMode::noma, PairingStrategy::resource_conservative, HarqMode::chase_combining, CsiMode::statistical},
      {AccessMode::noma, PairingStrategy::resource_conservative, HarqMode::incremental_redundancy,
       CsiMode::statistical},
      {AccessMode::oma, PairingStrategy::power_conservative, HarqMode::incremental_redundancy,
       CsiMode::instantaneous},
      {AccessMode::noma, PairingStrategy::power_conservative, HarqMode::incremental_redundancy,
       CsiMode::instantaneous},
  };
  for (const auto& c : cases) {
    SystemConfig cfg;
    cfg.activation_prob = 12.0 / cfg.n_users;
    cfg.access_mode = c.access;
    cfg.pairing_strategy = c.strategy;
    cfg.harq_mode = c.harq;
    cfg.csi_mode = c.csi;
    Simulation sim(cfg, 9, place_users(cfg, 9));
    for (int i = 0; i < 40; ++i) {
      const auto pending = std::vector<PacketState>(sim.pending().begin(), sim.pending().end());
      const auto report = sim.step();
      // The decision in the report was taken over the buffers after this phase's arrivals.
      std::vector<PacketState> seen = pending;
      for (const auto& p : arrivals(9, report.phase, cfg, sim.users())) seen.push_back(p);
      check_decision(report.decision, seen, cfg);
    }
  }
}
