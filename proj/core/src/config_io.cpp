#include "urllc/config_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "urllc/channel.hpp"

namespace urllc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, fmt::format("not a number: '{}'", v));
  return x;
}

template <typename T>
T to_unsigned(const std::string& key, std::string_view v) {
  T x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, fmt::format("not a non-negative integer: '{}'", v));
  return x;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, fmt::format("not a boolean: '{}'", v));
}

std::string fmt_real(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

CsiMode parse_csi_mode(std::string_view s) {
  if (s == "statistical") return CsiMode::statistical;
  if (s == "instantaneous") return CsiMode::instantaneous;
  throw ConfigError("csi", fmt::format("expected statistical or instantaneous, got '{}'", s));
}

HarqMode parse_harq_mode(std::string_view s) {
  if (s == "cc") return HarqMode::chase_combining;
  if (s == "ir") return HarqMode::incremental_redundancy;
  throw ConfigError("harq", fmt::format("expected cc or ir, got '{}'", s));
}

AccessMode parse_access_mode(std::string_view s) {
  if (s == "oma") return AccessMode::oma;
  if (s == "noma") return AccessMode::noma;
  throw ConfigError("access", fmt::format("expected oma or noma, got '{}'", s));
}

PairingStrategy parse_pairing_strategy(std::string_view s) {
  if (s == "pc") return PairingStrategy::power_conservative;
  if (s == "rc") return PairingStrategy::resource_conservative;
  throw ConfigError("strategy", fmt::format("expected pc or rc, got '{}'", s));
}

SystemConfig parse_config(std::string_view text) {
  SystemConfig cfg;
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(line), fmt::format("line {}: expected key = value", line_no));
    std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    kv[std::move(key)] = std::string(value);
  }

  std::optional<double> bn, noise_dbm;
  bool warmup_given = false;
  for (const auto& [key, value] : kv) {
    if (key == "n_users") cfg.n_users = to_unsigned<std::uint32_t>(key, value);
    else if (key == "n_slots") cfg.n_slots_per_phase = to_unsigned<std::uint32_t>(key, value);
    else if (key == "max_retx") cfg.max_retx = to_unsigned<std::uint32_t>(key, value);
    else if (key == "blocklength") cfg.blocklength = to_unsigned<std::uint32_t>(key, value);
    else if (key == "rate") cfg.rate = to_double(key, value);
    else if (key == "bn") bn = to_double(key, value);
    else if (key == "activation_prob") cfg.activation_prob = to_double(key, value);
    else if (key == "target_bler") cfg.target_bler = to_double(key, value);
    else if (key == "drop_threshold") cfg.drop_threshold = to_double(key, value);
    else if (key == "dist_min") cfg.dist_min = to_double(key, value);
    else if (key == "dist_max") cfg.dist_max = to_double(key, value);
    else if (key == "pathloss_exp") cfg.pathloss_exp = to_double(key, value);
    else if (key == "noise_dbm") noise_dbm = to_double(key, value);
    else if (key == "noise_w") cfg.noise_power = to_double(key, value);
    else if (key == "csi") cfg.csi_mode = parse_csi_mode(value);
    else if (key == "harq") cfg.harq_mode = parse_harq_mode(value);
    else if (key == "access") cfg.access_mode = parse_access_mode(value);
    else if (key == "strategy") cfg.pairing_strategy = parse_pairing_strategy(value);
    else if (key == "n_phases") cfg.n_phases = to_unsigned<std::uint32_t>(key, value);
    else if (key == "warmup_phases") {
      cfg.warmup_phases = to_unsigned<std::uint32_t>(key, value);
      warmup_given = true;
    } else if (key == "seed") cfg.seed = to_unsigned<std::uint64_t>(key, value);
    else if (key == "fixed_geometry") cfg.fixed_geometry = to_bool(key, value);
    else throw ConfigError(key, "unknown key");
  }
  if (bn && kv.count("activation_prob")) throw ConfigError("bn", "conflicts with activation_prob");
  if (noise_dbm && kv.count("noise_w")) throw ConfigError("noise_dbm", "conflicts with noise_w");
  if (bn) {
    if (!(*bn >= 0.0 && *bn <= cfg.n_users)) throw ConfigError("bn", "must lie in [0, n_users]");
    cfg.activation_prob = *bn / cfg.n_users;
  }
  if (noise_dbm) cfg.noise_power = dbm_to_watts(*noise_dbm);
  if (!warmup_given) cfg.warmup_phases = default_warmup(cfg.max_retx);
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const SystemConfig& cfg) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  put("n_users", std::to_string(cfg.n_users));
  put("n_slots", std::to_string(cfg.n_slots_per_phase));
  put("max_retx", std::to_string(cfg.max_retx));
  put("blocklength", std::to_string(cfg.blocklength));
  put("rate", fmt_real(cfg.rate));
  put("activation_prob", fmt_real(cfg.activation_prob));
  put("target_bler", fmt_real(cfg.target_bler));
  put("drop_threshold", fmt_real(cfg.drop_threshold));
  put("dist_min", fmt_real(cfg.dist_min));
  put("dist_max", fmt_real(cfg.dist_max));
  put("pathloss_exp", fmt_real(cfg.pathloss_exp));
  put("noise_w", fmt_real(cfg.noise_power));
  put("csi", std::string(to_string(cfg.csi_mode)));
  put("harq", std::string(to_string(cfg.harq_mode)));
  put("access", std::string(to_string(cfg.access_mode)));
  put("strategy", std::string(to_string(cfg.pairing_strategy)));
  put("n_phases", std::to_string(cfg.n_phases));
  put("warmup_phases", std::to_string(cfg.warmup_phases));
  put("seed", std::to_string(cfg.seed));
  put("fixed_geometry", cfg.fixed_geometry ? "true" : "false");
  return out;
}

}  // namespace urllc
