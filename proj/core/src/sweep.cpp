#include "urllc/sweep.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "urllc/channel.hpp"
#include "urllc/config_io.hpp"
#include "urllc/rng.hpp"
#include "urllc/sim_engine.hpp"

namespace urllc {

std::string_view to_string(SweepAxis a) { return a == SweepAxis::arrivals ? "bn" : "rate"; }

SweepAxis parse_sweep_axis(std::string_view s) {
  if (s == "bn") return SweepAxis::arrivals;
  if (s == "rate") return SweepAxis::rate;
  throw ConfigError("axis", fmt::format("expected bn or rate, got '{}'", s));
}

SystemConfig point_config(const SystemConfig& base, SweepAxis axis, double value) {
  SystemConfig cfg = base;
  if (axis == SweepAxis::arrivals) {
    if (!(value >= 0.0 && value <= base.n_users)) throw ConfigError("bn", "must lie in [0, n_users]");
    cfg.activation_prob = value / base.n_users;
  } else {
    cfg.rate = value;
  }
  cfg.validate();
  return cfg;
}

namespace {

std::optional<double> to_dbm(std::optional<double> watts) {
  if (!watts || *watts <= 0.0) return std::nullopt;
  return watts_to_dbm(*watts);
}

}  // namespace

SweepRow summarize(double axis_value, const SystemConfig& cfg, const MetricsLedger& ledger, std::uint32_t trials) {
  SweepRow r;
  r.axis_value = axis_value;
  r.config = cfg;
  r.ledger = ledger;
  r.trials = trials;
  r.outage = availability_outage(ledger);
  r.outage_ci = availability_outage_ci(ledger);
  r.power_dbm = to_dbm(avg_power_per_packet(ledger));
  r.power_se_db = avg_power_se_db(ledger);
  r.power_delivered_dbm = to_dbm(avg_power_per_packet(ledger, std::nullopt, true));
  r.util = slot_utilization(ledger);
  r.util_ci = slot_utilization_ci(ledger);
  r.spectral_eff = spectral_efficiency(ledger, cfg.rate);
  for (int z = 0; z < kZones; ++z) r.zone_dbm[z] = to_dbm(avg_power_per_packet(ledger, z));
  r.loss = loss_rate(ledger);
  return r;
}

std::vector<SweepRow> run_sweep(const SweepRequest& req) {
  const std::size_t points = req.values.size();
  const std::uint32_t trials = std::max<std::uint32_t>(req.trials, 1);
  std::vector<std::optional<SystemConfig>> configs(points);
  std::vector<std::optional<std::string>> errors(points);
  for (std::size_t i = 0; i < points; ++i) {
    try {
      configs[i] = point_config(req.base, req.axis, req.values[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::vector<std::vector<MetricsLedger>> ledgers(points, std::vector<MetricsLedger>(trials));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t task; (task = next.fetch_add(1)) < points * trials;) {
      const std::size_t i = task / trials, t = task % trials;
      if (!configs[i]) continue;
      try {
        const SystemConfig& cfg = *configs[i];
        const std::uint64_t seed = derive_seed(req.base.seed, i, t);
        auto users = place_users(cfg, cfg.fixed_geometry ? req.base.seed : seed);
        ledgers[i][t] = run_trial(cfg, seed, std::move(users));
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!errors[i]) errors[i] = e.what();
      }
    }
  };
  const std::uint32_t n_threads = std::max<std::uint32_t>(req.threads, 1);
  {
    std::vector<std::jthread> pool;
    for (std::uint32_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
  }

  std::vector<SweepRow> rows;
  rows.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    MetricsLedger total;
    for (const auto& l : ledgers[i]) total.merge(l);
    SweepRow row = summarize(req.values[i], configs[i].value_or(req.base), total, trials);
    row.axis = req.axis;
    row.error = errors[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<std::string> kCsvColumns = {
    "axis",      "axis_value",  "access_mode",  "harq_mode",           "csi_mode",  "strategy",
    "outage",    "outage_ci_lo", "outage_ci_hi", "power_dbm",           "power_se",  "power_delivered_dbm",
    "util",      "util_ci_lo",  "util_ci_hi",   "se",                  "zone1_dbm", "zone2_dbm",
    "zone3_dbm", "loss",        "arrivals",     "seed",                "phases",    "trials",
};

namespace {

std::string num(double x) { return fmt::format("{:.12g}", x); }
std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

double rounded(double x) { return std::stod(num(x)); }

nlohmann::json jnum(const std::optional<double>& x) {
  return x ? nlohmann::json(rounded(*x)) : nlohmann::json(nullptr);
}

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    const auto& c = r.config;
    out << to_string(r.axis) << ',' << num(r.axis_value) << ',' << to_string(c.access_mode) << ','
        << to_string(c.harq_mode) << ',' << to_string(c.csi_mode) << ',' << to_string(c.pairing_strategy) << ','
        << num(r.outage) << ',' << num(r.outage_ci.lo) << ',' << num(r.outage_ci.hi) << ',' << num(r.power_dbm)
        << ',' << num(r.power_se_db) << ',' << num(r.power_delivered_dbm) << ',' << num(r.util) << ','
        << num(r.util_ci.lo) << ',' << num(r.util_ci.hi) << ',' << num(r.spectral_eff) << ','
        << num(r.zone_dbm[0]) << ',' << num(r.zone_dbm[1]) << ',' << num(r.zone_dbm[2]) << ',' << num(r.loss)
        << ',' << r.ledger.arrivals << ',' << c.seed << ',' << r.ledger.phases_observed << ',' << r.trials
        << '\n';
  }
}

void write_json(const std::vector<SweepRow>& rows, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& c = r.config;
    nlohmann::json j;
    j["axis"] = std::string(to_string(r.axis));
    j["axis_value"] = rounded(r.axis_value);
    j["access_mode"] = std::string(to_string(c.access_mode));
    j["harq_mode"] = std::string(to_string(c.harq_mode));
    j["csi_mode"] = std::string(to_string(c.csi_mode));
    j["strategy"] = std::string(to_string(c.pairing_strategy));
    j["outage"] = rounded(r.outage);
    j["outage_ci_lo"] = rounded(r.outage_ci.lo);
    j["outage_ci_hi"] = rounded(r.outage_ci.hi);
    j["power_dbm"] = jnum(r.power_dbm);
    j["power_se"] = jnum(r.power_se_db);
    j["power_delivered_dbm"] = jnum(r.power_delivered_dbm);
    j["util"] = rounded(r.util);
    j["util_ci_lo"] = rounded(r.util_ci.lo);
    j["util_ci_hi"] = rounded(r.util_ci.hi);
    j["se"] = rounded(r.spectral_eff);
    j["zone1_dbm"] = jnum(r.zone_dbm[0]);
    j["zone2_dbm"] = jnum(r.zone_dbm[1]);
    j["zone3_dbm"] = jnum(r.zone_dbm[2]);
    j["loss"] = rounded(r.loss);
    j["arrivals"] = r.ledger.arrivals;
    j["seed"] = c.seed;
    j["phases"] = r.ledger.phases_observed;
    j["trials"] = r.trials;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void emit(const std::vector<SweepRow>& rows, std::string_view format, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no results to emit");
  if (format != "csv" && format != "json") throw std::invalid_argument(fmt::format("unknown format '{}'", format));
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  if (format == "csv")
    write_csv(rows, out);
  else
    write_json(rows, out);
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path));
}

}  // namespace urllc
