#include "urllc/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace urllc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact search over (remaining vertices, pairs still to form). The lowest remaining
// vertex is either left single or matched with one of its eligible neighbours.
class PairSearch {
 public:
  PairSearch(std::uint32_t n, std::span<const PairEdge> edges) : n_(n), cost_(n * n, kInf) {
    for (const auto& e : edges) {
      if (e.a >= n || e.b >= n || e.a == e.b) throw std::invalid_argument("select_pairs: bad edge");
      const double c = std::min(cost_[e.a * n + e.b], e.cost);
      cost_[e.a * n + e.b] = cost_[e.b * n + e.a] = c;
    }
  }

  double best(std::uint64_t mask, std::uint32_t k) {
    if (k == 0) return 0.0;
    if (static_cast<std::uint32_t>(std::popcount(mask)) < 2 * k) return kInf;
    if (memo_.size() <= k) memo_.resize(k + 1);
    auto& memo = memo_[k];
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    const std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(mask));
    const std::uint64_t rest = mask & ~(std::uint64_t{1} << v);
    double value = best(rest, k);
    for (std::uint64_t m = rest; m; m &= m - 1) {
      const std::uint32_t u = static_cast<std::uint32_t>(std::countr_zero(m));
      const double c = cost_[v * n_ + u];
      if (c == kInf) continue;
      const double sub = best(rest & ~(std::uint64_t{1} << u), k - 1);
      if (c + sub < value) value = c + sub;
    }
    memo_[k].emplace(mask, value);
    return value;
  }

  void trace(std::uint64_t mask, std::uint32_t k, std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
    while (k > 0) {
      const double target = best(mask, k);
      const std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(mask));
      const std::uint64_t rest = mask & ~(std::uint64_t{1} << v);
      if (best(rest, k) == target) {
        mask = rest;
        continue;
      }
      bool found = false;
      for (std::uint64_t m = rest; m; m &= m - 1) {
        const std::uint32_t u = static_cast<std::uint32_t>(std::countr_zero(m));
        const double c = cost_[v * n_ + u];
        if (c == kInf) continue;
        const std::uint64_t next = rest & ~(std::uint64_t{1} << u);
        if (c + best(next, k - 1) == target) {
          out.emplace_back(v, u);
          mask = next;
          --k;
          found = true;
          break;
        }
      }
      if (!found) throw std::logic_error("select_pairs: inconsistent search state");
    }
  }

 private:
  std::uint32_t n_;
  std::vector<double> cost_;
  std::vector<std::unordered_map<std::uint64_t, double>> memo_;  // indexed by pairs to form
};

}  // namespace

Matching select_pairs(std::uint32_t n_vertices, std::span<const PairEdge> edges, std::uint32_t q) {
  if (n_vertices > 63) throw std::invalid_argument("select_pairs supports at most 63 vertices");
  Matching result;
  if (q == 0) return result;
  if (n_vertices < 2) {
    result.shortfall = q;
    return result;
  }
  PairSearch search(n_vertices, edges);
  const std::uint64_t all = (std::uint64_t{1} << n_vertices) - 1;
  std::uint32_t k = std::min(q, n_vertices / 2);
  while (k > 0 && search.best(all, k) == kInf) --k;
  result.shortfall = q - k;
  if (k == 0) return result;
  result.total_cost = search.best(all, k);
  search.trace(all, k, result.pairs);
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace urllc
