#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Plain-text `key = value` reader shared by the config and override files.
namespace exosim::kv {

struct Entry {
  int line = 0;
  std::string key;
  std::string value;
};

/// Blank lines and lines starting with '#' are skipped; anything else must
/// contain '='. Throws ParseError with the line number.
std::vector<Entry> parse(std::string_view text);
std::vector<Entry> read_file(const std::filesystem::path& path);

double to_double(const Entry& e);
std::int64_t to_int(const Entry& e);
bool to_bool(const Entry& e);

/// Shortest representation that parses back to the identical double.
std::string format(double value);

}  // namespace exosim::kv
