#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace exosim::anthropometry {

inline constexpr int kSegmentCount = 13;
inline constexpr int kHipPivot = 12;
inline constexpr int kKneePivot = 13;
inline constexpr int kThighs = 9;

struct Segment {
  std::string_view name;
  std::optional<double> mass_kg;  // absent for the two pivot rows
  double height_m = 0.0;          // CoM height above ground, or pivot height
};

/// Reference body-segment data of a 81.4 kg / 1.784 m human model.
struct SegmentTable {
  std::array<Segment, kSegmentCount> entries;
  double total_mass_kg = 0.0;
  double total_height_m = 0.0;

  /// 1-based access matching the tabulated row numbers.
  const Segment& at(int index) const;
  Segment& at(int index);

  double mass(int index) const;
  double height(int index) const { return at(index).height_m; }
};

/// Subject-scaled lumped model used by the knee torque estimate.
struct HumanModel {
  double subject_mass_kg = 0.0;
  double subject_height_m = 0.0;
  double upper_body_mass_kg = 0.0;     // head through hands, rows 1..8
  double thigh_mass_kg = 0.0;          // bilateral thigh total
  double upper_body_com_lever_m = 0.0; // hip pivot to upper-body CoM
  double thigh_length_m = 0.0;         // hip pivot to knee pivot
  double thigh_com_lever_m = 0.0;      // knee pivot to thigh CoM
};

const SegmentTable& reference_segments();

HumanModel build_human_model(double mass_kg, double height_m,
                             const SegmentTable& table = reference_segments());

/// Hard invariants throw ConfigError; soft ones (mass budget) come back as warnings.
std::vector<std::string> validate(const SegmentTable& table);

/// Applies one `segment.<i>.mass_kg` / `segment.<i>.com_height_m` /
/// `total.mass_kg` / `total.height_m` entry. Returns false for foreign keys.
bool apply_override(SegmentTable& table, std::string_view key, double value);

/// Reads a key=value override file on top of `base`.
SegmentTable load_overrides(const std::filesystem::path& path,
                            const SegmentTable& base = reference_segments());

}  // namespace exosim::anthropometry
