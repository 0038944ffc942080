#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/metrics.hpp"

namespace urllc {

enum class SweepAxis { arrivals, rate };

std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view s);

struct SweepRequest {
  SystemConfig base;
  SweepAxis axis = SweepAxis::arrivals;
  std::vector<double> values;  // bN or R per point
  std::uint32_t trials = 1;
  std::uint32_t threads = 1;
};

/// Summary of one sweep point, aggregated over its trials.
struct SweepRow {
  SweepAxis axis = SweepAxis::arrivals;
  double axis_value = 0.0;
  SystemConfig config;
  MetricsLedger ledger;
  std::uint32_t trials = 0;
  std::optional<std::string> error;

  double outage = 0.0;
  Interval outage_ci;
  std::optional<double> power_dbm;
  std::optional<double> power_se_db;
  std::optional<double> power_delivered_dbm;
  double util = 0.0;
  Interval util_ci;
  double spectral_eff = 0.0;
  std::array<std::optional<double>, kZones> zone_dbm{};
  double loss = 0.0;
};

/// Configuration of point `value` on `axis`.
SystemConfig point_config(const SystemConfig& base, SweepAxis axis, double value);

/// Fills the derived fields of a row from its ledger.
SweepRow summarize(double axis_value, const SystemConfig& cfg, const MetricsLedger& ledger, std::uint32_t trials);

/// Runs every (point, trial) pair on a worker pool. Trial t of point i uses
/// seed derive_seed(base.seed, i, t); with fixed_geometry users come from base.seed.
std::vector<SweepRow> run_sweep(const SweepRequest& req);

extern const std::vector<std::string> kCsvColumns;

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_json(const std::vector<SweepRow>& rows, std::ostream& out);
/// Writes to `path` in "csv" or "json"; throws std::runtime_error when the path is unwritable.
void emit(const std::vector<SweepRow>& rows, std::string_view format, const std::string& path);

}  // namespace urllc
