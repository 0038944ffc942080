#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "urllc/channel.hpp"
#include "urllc/rng.hpp"

using namespace urllc;

TEST(Rng, SameStreamSameSequence) {
  RngStream a(42, {7, StreamPurpose::channel, 3}), b(42, {7, StreamPurpose::channel, 3});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsIndependentOfEvaluationOrder) {
  std::vector<std::uint64_t> forward, backward(3);
  for (std::uint64_t p = 0; p < 3; ++p) forward.push_back(RngStream(5, {p, StreamPurpose::arrival, 1}).next_u64());
  for (int p = 2; p >= 0; --p) backward[p] = RngStream(5, {static_cast<std::uint64_t>(p), StreamPurpose::arrival, 1}).next_u64();
  EXPECT_EQ(forward, backward);
}

TEST(Rng, DistinctPurposesDiffer) {
  std::set<std::uint64_t> seen;
  for (auto purpose : {StreamPurpose::distance, StreamPurpose::arrival, StreamPurpose::channel,
                       StreamPurpose::mutual_information})
    seen.insert(RngStream(1, {0, purpose, 0}).next_u64());
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
}

TEST(Rng, UniformAndNormalMoments) {
  RngStream r(9, {0, StreamPurpose::oracle, 0});
  double su = 0, sn = 0, sn2 = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.002);
  EXPECT_NEAR(sn / n, 0.0, 0.005);
  EXPECT_NEAR(sn2 / n, 1.0, 0.005);
}

TEST(Channel, DistanceDraws) {
  RngStream r(3, {0, StreamPurpose::distance, 0});
  EXPECT_EQ(draw_distance(r, 50.0, 50.0), 50.0);
  double sum = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double d = draw_distance(r, 20.0, 120.0);
    ASSERT_GE(d, 20.0);
    ASSERT_LE(d, 120.0);
    sum += d;
  }
  EXPECT_NEAR(sum / n, 70.0, 0.5);
}

TEST(Channel, GainIsUnitExponential) {
  RngStream r(4, {0, StreamPurpose::channel, 0});
  const double fade = -std::log1p(-0.1);
  double sum = 0;
  int below = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double g = draw_channel_gain(r);
    ASSERT_GE(g, 0.0);
    sum += g;
    below += g < fade;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.01);
  EXPECT_NEAR(static_cast<double>(below) / n, 0.1, 0.002);
}

TEST(Channel, ReceivedSnr) {
  EXPECT_DOUBLE_EQ(received_snr(1, 1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(received_snr(0, 0.7, 400, 1e-16), 0.0);
  EXPECT_NEAR(received_snr(2.0, 0.5, 400.0, 1.23e-16), 2.0325203e13, 1e6);
}

TEST(Channel, UsersAndZones) {
  SystemConfig cfg;
  const auto users = place_users(cfg, 11);
  ASSERT_EQ(users.size(), cfg.n_users);
  for (const auto& u : users) {
    EXPECT_GE(u.distance, cfg.dist_min);
    EXPECT_LE(u.distance, cfg.dist_max);
    EXPECT_EQ(u.pathloss, std::pow(u.distance, cfg.pathloss_exp));
  }
  EXPECT_EQ(place_users(cfg, 11)[5].distance, users[5].distance);
  EXPECT_EQ(distance_zone(53.3, 20, 120), 0);
  EXPECT_EQ(distance_zone(53.4, 20, 120), 1);
  EXPECT_EQ(distance_zone(86.6, 20, 120), 1);
  EXPECT_EQ(distance_zone(86.7, 20, 120), 2);
  EXPECT_NEAR(dbm_to_watts(0.0), 1e-3, 1e-18);
  EXPECT_NEAR(watts_to_dbm(2e-3), 3.0103, 1e-4);
}
