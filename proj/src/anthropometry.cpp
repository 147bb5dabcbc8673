#include "exosim/anthropometry.hpp"

#include <charconv>
#include <cmath>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"

namespace exosim::anthropometry {

namespace {

SegmentTable make_reference() {
  SegmentTable t;
  t.entries = {{
      {"Head", 4.2, 1.679},
      {"Neck", 1.1, 1.545},
      {"Thorax", 24.9, 1.308},
      {"Abdomen", 2.4, 1.099},
      {"Pelvis", 11.8, 0.983},
      {"Arms", 4.0, 1.285},
      {"Forearms", 2.8, 1.027},
      {"Hands", 1.0, 0.792},
      {"Thighs", 19.6, 0.75},
      {"Calfs", 7.6, 0.33},
      {"Feet", 2.0, 0.028},
      {"Hip Pivot to Ground", std::nullopt, 0.946},
      {"Knee Pivot to Ground", std::nullopt, 0.505},
  }};
  t.total_mass_kg = 81.4;
  t.total_height_m = 1.784;
  return t;
}

void check_index(int index) {
  if (index < 1 || index > kSegmentCount) {
    throw ConfigError("segment index " + std::to_string(index) + " outside 1.." +
                      std::to_string(kSegmentCount));
  }
}

}  // namespace

const Segment& SegmentTable::at(int index) const {
  check_index(index);
  return entries[static_cast<std::size_t>(index - 1)];
}

Segment& SegmentTable::at(int index) {
  check_index(index);
  return entries[static_cast<std::size_t>(index - 1)];
}

double SegmentTable::mass(int index) const {
  const auto& seg = at(index);
  if (!seg.mass_kg) {
    throw ConfigError("segment " + std::to_string(index) + " (" + std::string(seg.name) +
                      ") has no mass");
  }
  return *seg.mass_kg;
}

const SegmentTable& reference_segments() {
  static const SegmentTable table = make_reference();
  return table;
}

HumanModel build_human_model(double mass_kg, double height_m, const SegmentTable& table) {
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) {
    throw InvalidSubject("subject mass must be positive, got " + kv::format(mass_kg));
  }
  if (!(height_m > 0.0) || !std::isfinite(height_m)) {
    throw InvalidSubject("subject height must be positive, got " + kv::format(height_m));
  }

  const double mass_ratio = mass_kg / table.total_mass_kg;
  const double height_ratio = height_m / table.total_height_m;

  double upper_mass = 0.0;
  double upper_moment = 0.0;
  for (int i = 1; i <= 8; ++i) {
    upper_mass += table.mass(i);
    upper_moment += table.mass(i) * table.height(i);
  }
  const double hip = table.height(kHipPivot);
  const double knee = table.height(kKneePivot);

  HumanModel m;
  m.subject_mass_kg = mass_kg;
  m.subject_height_m = height_m;
  m.upper_body_mass_kg = mass_ratio * upper_mass;
  m.thigh_mass_kg = mass_ratio * table.mass(kThighs);
  m.upper_body_com_lever_m = height_ratio * (upper_moment / upper_mass - hip);
  m.thigh_length_m = height_ratio * (hip - knee);
  m.thigh_com_lever_m = height_ratio * (table.height(kThighs) - knee);
  return m;
}

std::vector<std::string> validate(const SegmentTable& table) {
  if (!(table.total_mass_kg > 0.0) || !(table.total_height_m > 0.0)) {
    throw ConfigError("reference totals must be positive");
  }
  double sum = 0.0;
  for (int i = 1; i <= 11; ++i) {
    const double m = table.mass(i);
    if (!(m > 0.0)) throw ConfigError("segment " + std::to_string(i) + " mass must be positive");
    sum += m;
  }
  for (int i = 1; i <= kSegmentCount; ++i) {
    if (!std::isfinite(table.height(i))) {
      throw ConfigError("segment " + std::to_string(i) + " height must be finite");
    }
  }
  const double hip = table.height(kHipPivot);
  const double knee = table.height(kKneePivot);
  if (!(hip > knee && knee > 0.0)) {
    throw ConfigError("pivot heights must satisfy hip > knee > 0");
  }
  if (!(table.height(kThighs) > knee && table.height(kThighs) < hip)) {
    throw ConfigError("thigh CoM must lie between the knee and hip pivots");
  }

  std::vector<std::string> warnings;
  // Tolerate the rounding of tabulated one-decimal masses.
  if (sum > table.total_mass_kg * (1.0 + 1e-12)) {
    warnings.push_back("segment masses sum to " + kv::format(sum) +
                       " kg, above the stated total " + kv::format(table.total_mass_kg) + " kg");
  }
  return warnings;
}

bool apply_override(SegmentTable& table, std::string_view key, double value) {
  if (key == "total.mass_kg") {
    table.total_mass_kg = value;
    return true;
  }
  if (key == "total.height_m") {
    table.total_height_m = value;
    return true;
  }
  constexpr std::string_view prefix = "segment.";
  if (!key.starts_with(prefix)) return false;
  key.remove_prefix(prefix.size());
  const auto dot = key.find('.');
  if (dot == std::string_view::npos) return false;

  int index = 0;
  const auto digits = key.substr(0, dot);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return false;
  if (index < 1 || index > kSegmentCount) return false;

  const auto field = key.substr(dot + 1);
  auto& seg = table.at(index);
  if (field == "mass_kg") {
    if (index >= kHipPivot) throw ConfigError("pivot rows carry no mass");
    seg.mass_kg = value;
    return true;
  }
  if (field == "com_height_m") {
    seg.height_m = value;
    return true;
  }
  return false;
}

SegmentTable load_overrides(const std::filesystem::path& path, const SegmentTable& base) {
  SegmentTable table = base;
  for (const auto& e : kv::read_file(path)) {
    if (!apply_override(table, e.key, kv::to_double(e))) throw UnknownKey(e.line, e.key);
  }
  validate(table);
  return table;
}

}  // namespace exosim::anthropometry
