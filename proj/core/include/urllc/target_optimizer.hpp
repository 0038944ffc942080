#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/packet.hpp"

namespace urllc {

enum class TargetMode { cc, ir };

/// Per-round error targets eps[0..L] whose product equals `budget`.
struct TargetSchedule {
  std::vector<double> eps;
  TargetMode mode = TargetMode::cc;
  double rate = 0.0;
  double budget = 0.0;
  /// Expected power divided by gamma * pathloss * noise.
  double factor = 0.0;
};

/// Raised when a target optimization fails to converge.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Dimensionless expected CC power of a target sequence:
/// sum_i -1/ln(1-eps_i) * prod_{k<i} (ln(1-eps_k) + eps_k) / ln(1-eps_k).
double cc_expected_power_factor(std::span<const double> eps);

/// Optimal CC targets for L retransmissions under budget `eps_tar` (memoized).
TargetSchedule cc_optimal_targets(std::uint32_t L, double eps_tar);
/// Same computation bypassing the memo.
TargetSchedule cc_optimal_targets_uncached(std::uint32_t L, double eps_tar);

/// Taylor-approximated expected IR power of the last two rounds when the
/// penultimate round uses target eps_pen and the last eps_last.
double ir_psi_last(double gamma, double eps_pen, double eps_last, double pathloss, double noise);

struct NextTarget {
  double eps = 1.0;
  double value = 0.0;  // normalized expected power (pathloss = noise = 1)
  bool interior = true;
};

/// Minimizer of ir_psi_last over eps_pen with eps_last = budget / eps_pen.
NextTarget ir_next_target_search(double gamma, double budget);
double ir_next_target(double gamma, double budget, double pathloss, double noise);

/// Normalized IR expected power from the antepenultimate round when its target is eps0.
double ir_two_stage_cost(double gamma, double budget, double eps0);

struct InitialTarget {
  double eps = 1.0;
  double value = 0.0;  // normalized expected power at the optimum
};

/// Offline sweep for the first-round IR target with two retransmissions (memoized).
InitialTarget ir_initial_search(double rate, double eps_tar);
InitialTarget ir_initial_search_uncached(double rate, double eps_tar);
double ir_initial_target(double rate, double eps_tar);

/// Normalized expected power (divide-out pathloss * noise) of a packet with
/// residual `gamma`, budget `budget` and `remaining` rounds left after the current one.
double expected_power_normalized(HarqMode mode, double rate, double gamma, double budget,
                                 std::uint32_t remaining);

/// Target for the current round of a packet with the given residual and budget.
double round_target(HarqMode mode, double rate, double gamma, double budget,
                    std::uint32_t remaining);

/// Expected OMA power of a statistical-CSI packet from its current round on.
/// With `skip_current` the current round is given up (power 0, target 1).
double expected_oma_power(const PacketState& packet, const SystemConfig& cfg, double pathloss,
                          bool skip_current);

/// Disk persistence for the memoized schedules (versioned text, 17 significant digits).
void save_target_cache(const std::string& path);
/// Returns the number of records loaded; throws std::runtime_error on a malformed file.
std::size_t load_target_cache(const std::string& path);
void clear_target_cache();

}  // namespace urllc
