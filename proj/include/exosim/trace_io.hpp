#pragma once

#include <filesystem>
#include <string>

#include "exosim/engine.hpp"

namespace exosim::io {

/// `# key = value` metadata lines, then the column header, then one row per
/// logged step. Numbers use the shortest round-trip form.
std::string log_to_string(const engine::TraceLog& log);
void write_log(const std::filesystem::path& path, const engine::TraceLog& log);

/// Reads a log written by write_log. Metadata lines are kept as header pairs.
engine::TraceLog read_log(const std::filesystem::path& path);

std::string metrics_to_text(const engine::Metrics& m);
std::string metrics_to_json(const engine::Metrics& m, const std::string& scenario);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace exosim::io
