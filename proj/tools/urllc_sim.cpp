// Batch driver: single runs, parameter sweeps and offline target/curve tables.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "urllc/config_io.hpp"
#include "urllc/fbl_optimizer.hpp"
#include "urllc/sim_engine.hpp"
#include "urllc/sweep.hpp"
#include "urllc/target_optimizer.hpp"

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* app, ConfigArgs& args) {
  app->add_option("-c,--config", args.path, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("-s,--set", args.overrides, "override one key, e.g. --set access=noma")->allow_extra_args(false);
}

urllc::SystemConfig load(const ConfigArgs& args) {
  std::string text;
  if (!args.path.empty()) {
    std::ifstream in(args.path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  for (const auto& o : args.overrides) text += "\n" + o;
  return urllc::parse_config(text);
}

std::string target_cache_file(const std::string& dir) { return (std::filesystem::path(dir) / "targets.txt").string(); }

void open_caches(const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  urllc::set_curve_cache_dir(dir);
  if (std::filesystem::exists(target_cache_file(dir))) urllc::load_target_cache(target_cache_file(dir));
}

void close_caches(const std::string& dir) {
  if (!dir.empty()) urllc::save_target_cache(target_cache_file(dir));
}

void write_rows(const std::vector<urllc::SweepRow>& rows, const std::string& format, const std::string& output) {
  if (output.empty() || output == "-") {
    if (format == "json")
      urllc::write_json(rows, std::cout);
    else
      urllc::write_csv(rows, std::cout);
  } else {
    urllc::emit(rows, format, output);
  }
}

int report_errors(const std::vector<urllc::SweepRow>& rows) {
  int failed = 0;
  for (const auto& r : rows)
    if (r.error) {
      std::cerr << fmt::format("point {}: {}\n", r.axis_value, *r.error);
      ++failed;
    }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"URLLC uplink HARQ/NOMA Monte Carlo simulator"};
  app.require_subcommand(1);
  std::string cache_dir, format = "csv", output;
  app.add_option("--cache-dir", cache_dir, "directory for precomputed targets and power curves");

  ConfigArgs run_cfg;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  add_config_options(run, run_cfg);
  run->add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("-o,--output", output, "output path (stdout if omitted)");
  bool print_config = false;
  run->add_flag("--print-config", print_config, "print the resolved configuration and exit");

  ConfigArgs sweep_cfg;
  std::string axis = "bn";
  std::vector<double> values;
  std::uint32_t trials = 1, threads = 1;
  auto* sweep = app.add_subcommand("sweep", "simulate a grid of arrival loads or rates");
  add_config_options(sweep, sweep_cfg);
  sweep->add_option("-a,--axis", axis, "bn or rate")->check(CLI::IsMember({"bn", "rate"}));
  sweep->add_option("-v,--values", values, "axis values")->required()->delimiter(',');
  sweep->add_option("-t,--trials", trials, "trials per point")->check(CLI::PositiveNumber);
  sweep->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("-o,--output", output, "output path (stdout if omitted)");

  std::string harq = "cc";
  std::uint32_t retx = 2;
  double eps_tar = 1e-5;
  std::vector<double> rates{1.0};
  auto* targets = app.add_subcommand("targets", "print per-round error targets of a fresh packet");
  targets->add_option("--harq", harq, "cc or ir")->check(CLI::IsMember({"cc", "ir"}));
  targets->add_option("-L,--max-retx", retx, "retransmissions");
  targets->add_option("-e,--target", eps_tar, "end-to-end error target");
  targets->add_option("-r,--rates", rates, "rates (ir only)")->delimiter(',');

  urllc::CurveKey key{2, 1.0, 50, 1e-5, 1e-6};
  auto* curve = app.add_subcommand("curve", "build a finite-blocklength power curve");
  curve->add_option("-m,--remaining", key.remaining_rounds, "remaining rounds (0, 1 or 2)")
      ->check(CLI::Range(0u, 2u));
  curve->add_option("-r,--rate", key.rate, "rate in bits per symbol");
  curve->add_option("-k,--blocklength", key.blocklength, "symbols per packet");
  curve->add_option("-e,--target", key.eps_tar, "end-to-end error target");
  curve->add_option("-d,--drop", key.eps_drop, "deep-fade drop threshold");
  curve->add_option("-o,--output", output, "output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    open_caches(cache_dir);
    int code = 0;
    if (*run) {
      const auto cfg = load(run_cfg);
      if (print_config) {
        std::cout << urllc::emit_config(cfg);
        return 0;
      }
      const std::vector<urllc::SweepRow> rows{urllc::summarize(cfg.mean_arrivals(), cfg, urllc::run(cfg), 1)};
      write_rows(rows, format, output);
    } else if (*sweep) {
      const urllc::SweepRequest req{load(sweep_cfg), urllc::parse_sweep_axis(axis), values, trials, threads};
      const auto rows = urllc::run_sweep(req);
      write_rows(rows, format, output);
      code = report_errors(rows);
    } else if (*targets) {
      if (harq == "cc") {
        const auto s = urllc::cc_optimal_targets(retx, eps_tar);
        std::cout << "round,target\n";
        for (std::size_t l = 0; l < s.eps.size(); ++l) std::cout << fmt::format("{},{:.12g}\n", l, s.eps[l]);
        std::cout << fmt::format("# expected power factor {:.12g}\n", s.factor);
      } else {
        std::cout << "rate,initial_target,normalized_power\n";
        for (double r : rates) {
          const auto t = urllc::ir_initial_search(r, eps_tar);
          std::cout << fmt::format("{:.12g},{:.12g},{:.12g}\n", r, t.eps, t.value);
        }
      }
    } else if (*curve) {
      const auto& c = urllc::power_curve(key);
      if (output.empty() || output == "-") {
        std::cout << "gain,power,cost,error\n";
        for (std::size_t i = 0; i < c.gains.size(); ++i)
          std::cout << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g}\n", c.gains[i], c.powers[i], c.costs[i],
                                   c.errors[i]);
      } else {
        urllc::save_power_curve(c, output);
      }
    }
    close_caches(cache_dir);
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
