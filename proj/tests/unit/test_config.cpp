#include <gtest/gtest.h>

#include <cmath>

#include "urllc/channel.hpp"
#include "urllc/config.hpp"
#include "urllc/config_io.hpp"

using namespace urllc;

TEST(Config, DefaultsMatchReferenceScenario) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.n_users, 40u);
  EXPECT_EQ(cfg.n_slots_per_phase, 10u);
  EXPECT_EQ(cfg.max_retx, 2u);
  EXPECT_EQ(cfg.blocklength, 50u);
  EXPECT_DOUBLE_EQ(cfg.target_bler, 1e-5);
  EXPECT_DOUBLE_EQ(cfg.drop_threshold, 1e-6);
  EXPECT_DOUBLE_EQ(cfg.dist_min, 20.0);
  EXPECT_DOUBLE_EQ(cfg.dist_max, 120.0);
  EXPECT_DOUBLE_EQ(cfg.pathloss_exp, 2.0);
  EXPECT_NEAR(watts_to_dbm(cfg.noise_power), -129.1, 1e-9);
  // -173.9 dBm/Hz over 30 kHz.
  EXPECT_NEAR(watts_to_dbm(cfg.noise_power), -173.9 + 10.0 * std::log10(30e3), 0.03);
  EXPECT_EQ(cfg.warmup_phases, default_warmup(cfg.max_retx));
}

TEST(Config, BitsPerPacketDerived) {
  SystemConfig cfg;
  cfg.rate = 2.0;
  EXPECT_DOUBLE_EQ(cfg.bits_per_packet(), 100.0);
}

TEST(Config, RejectsInstantaneousChase) {
  try {
    parse_config("csi = instantaneous\nharq = cc\n");
    FAIL() << "accepted instantaneous CSI with chase combining";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "harq");
  }
}

TEST(Config, UnknownKeyNamed) {
  try {
    parse_config("n_users = 10\nbogus = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "bogus");
  }
}

TEST(Config, OutOfRangeValueNamed) {
  try {
    parse_config("target_bler = 1.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "target_bler");
  }
  try {
    parse_config("drop_threshold = 1e-3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "drop_threshold");
  }
  EXPECT_THROW(parse_config("rate = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("n_users 40\n"), ConfigError);
}

TEST(Config, ArrivalLoadAndNoiseUnits) {
  const auto cfg = parse_config("# comment line\nbn = 8   # trailing comment\nnoise_dbm = -100\n");
  EXPECT_DOUBLE_EQ(cfg.activation_prob, 0.2);
  EXPECT_NEAR(cfg.noise_power, 1e-13, 1e-25);
  EXPECT_THROW(parse_config("bn = 2\nactivation_prob = 0.1\n"), ConfigError);
}

TEST(Config, LaterAssignmentWins) {
  const auto cfg = parse_config("rate = 1\nrate = 2\n");
  EXPECT_DOUBLE_EQ(cfg.rate, 2.0);
}

TEST(Config, RoundTrip) {
  SystemConfig cfg;
  cfg.rate = 1.7;
  cfg.activation_prob = 0.137;
  cfg.access_mode = AccessMode::noma;
  cfg.pairing_strategy = PairingStrategy::resource_conservative;
  cfg.harq_mode = HarqMode::incremental_redundancy;
  cfg.noise_power = 3.3e-16;
  cfg.seed = 18446744073709551557ull;
  cfg.fixed_geometry = true;
  cfg.warmup_phases = 7;
  EXPECT_EQ(parse_config(emit_config(cfg)), cfg);
  const auto defaults = parse_config("");
  EXPECT_EQ(parse_config(emit_config(defaults)), defaults);
}
