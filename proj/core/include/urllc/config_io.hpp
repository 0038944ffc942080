#pragma once

#include <string>
#include <string_view>

#include "urllc/config.hpp"

namespace urllc {

/// Parses `key = value` lines ('#' starts a comment) over the default
/// configuration and validates the result. Powers may be given in dBm
/// (`noise_dbm`) or watts (`noise_w`); arrival load as `bn` (mean arrivals per
/// phase) or `activation_prob`. A repeated key takes its last value. Unknown
/// keys and bad values raise ConfigError.
SystemConfig parse_config(std::string_view text);

/// Reads and parses a configuration file.
SystemConfig load_config(const std::string& path);

/// Serializes every field so that parse_config(emit_config(c)) == c.
std::string emit_config(const SystemConfig& cfg);

CsiMode parse_csi_mode(std::string_view s);
HarqMode parse_harq_mode(std::string_view s);
AccessMode parse_access_mode(std::string_view s);
PairingStrategy parse_pairing_strategy(std::string_view s);

}  // namespace urllc
