#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exosim/sim_config.hpp"

namespace exosim::config {

/// Reads a key=value file on top of `base` and validates the result.
/// Keys ending in `_deg` are converted to radians; the echo only ever
/// writes the `_rad` spelling so it round-trips exactly.
SimConfig parse_config(const std::filesystem::path& path, SimConfig base = {});
SimConfig parse_config_text(std::string_view text, SimConfig base = {});

/// Sets one key without validating. Throws UnknownKey / ParseError.
void apply(SimConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Every setting in a canonical order.
std::vector<std::pair<std::string, std::string>> echo(const SimConfig& cfg);
std::string echo_text(const SimConfig& cfg);

/// Pulls the `# config key = value` lines back out of a trace log header.
SimConfig config_from_log(const std::filesystem::path& log_path);

std::vector<std::string> known_keys();

}  // namespace exosim::config
