#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "urllc/matching.hpp"

using namespace urllc;

TEST(SelectPairs, Triangle) {
  const std::vector<PairEdge> edges{{0, 1, 1.0}, {1, 2, 0.5}, {0, 2, 2.0}};
  const auto m = select_pairs(3, edges, 1);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0], std::make_pair(1u, 2u));
  EXPECT_DOUBLE_EQ(m.total_cost, 0.5);
  EXPECT_EQ(m.shortfall, 0u);
  const auto two = select_pairs(3, edges, 2);
  EXPECT_EQ(two.pairs.size(), 1u);
  EXPECT_EQ(two.shortfall, 1u);
}

TEST(SelectPairs, PrefersPerfectOverGreedy) {
  // Greedy takes (1,2) at cost 0 and strands 0 and 3.
  const std::vector<PairEdge> edges{{1, 2, 0.0}, {0, 1, 1.0}, {2, 3, 1.0}};
  const auto m = select_pairs(4, edges, 2);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(m.total_cost, 2.0);
  EXPECT_EQ(m.shortfall, 0u);
}

TEST(SelectPairs, EmptyAndZeroRequest) {
  EXPECT_TRUE(select_pairs(0, {}, 3).pairs.empty());
  EXPECT_EQ(select_pairs(0, {}, 3).shortfall, 3u);
  const std::vector<PairEdge> edges{{0, 1, 1.0}};
  EXPECT_TRUE(select_pairs(2, edges, 0).pairs.empty());
  EXPECT_EQ(select_pairs(2, edges, 0).shortfall, 0u);
}

TEST(SelectPairs, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 300; ++inst) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(u(gen) * 9);
    const double density = 0.3 + 0.7 * u(gen);
    std::vector<PairEdge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j)
        if (u(gen) < density) edges.push_back({i, j, u(gen)});
    const std::uint32_t q = static_cast<std::uint32_t>(u(gen) * (n / 2 + 1));
    const auto m = select_pairs(n, edges, q);
    const auto ref = oracle::brute_force_matching(n, edges, q);
    ASSERT_EQ(m.pairs.size(), ref.size) << "instance " << inst;
    EXPECT_NEAR(m.total_cost, ref.cost, 1e-9) << "instance " << inst;
    EXPECT_EQ(m.shortfall, q - ref.size);
    std::set<std::uint32_t> used;
    double sum = 0.0;
    for (const auto& [a, b] : m.pairs) {
      EXPECT_LT(a, b);
      EXPECT_TRUE(used.insert(a).second);
      EXPECT_TRUE(used.insert(b).second);
      bool found = false;
      for (const auto& e : edges)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
          found = true;
          sum += e.cost;
        }
      EXPECT_TRUE(found);
    }
    EXPECT_NEAR(sum, m.total_cost, 1e-12);
  }
}

TEST(SelectPairs, RejectsTooManyVertices) { EXPECT_THROW(select_pairs(64, {}, 1), std::invalid_argument); }
