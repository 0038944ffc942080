#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace urllc {

/// An eligible pairing between two vertices with its cost.
struct PairEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double cost = 0.0;
};

struct Matching {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // each with first < second, sorted
  double total_cost = 0.0;
  /// Requested pairs that could not be formed from the eligibility graph.
  std::uint32_t shortfall = 0;
};

/// Minimum-cost matching of exactly q disjoint pairs over `n_vertices` vertices
/// (at most 63). When fewer than q disjoint eligible pairs exist, returns the
/// cheapest matching of the largest achievable size and reports the shortfall.
Matching select_pairs(std::uint32_t n_vertices, std::span<const PairEdge> edges, std::uint32_t q);

}  // namespace urllc
