#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exosim/engine.hpp"

namespace exosim::scenario {

/// unpowered, zero-torque, assist-10, assist-30, assist-50, stoop-assist, custom.
const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);

/// Applies a preset's fixed settings (mode, gain and, for stoop-assist, the
/// lift kind) on top of `base`. "custom" leaves `base` untouched apart from
/// the name. Throws ConfigError for unknown names.
SimConfig apply_preset(std::string_view name, SimConfig base = {});

/// Bounds a scenario's metrics are checked against with --check-thresholds.
struct Threshold {
  std::string metric;
  double min = 0.0;
  double max = 0.0;
};
std::vector<Threshold> thresholds_for(std::string_view name);

struct ThresholdCheck {
  Threshold threshold;
  std::optional<double> value;  // missing when the metric is undefined
  bool met = false;
};
std::vector<ThresholdCheck> check(const std::vector<Threshold>& thresholds,
                                  const engine::Metrics& m);
std::optional<double> metric_value(const engine::Metrics& m, std::string_view metric);

struct Outcome {
  std::string name;
  engine::RunResult result;
  std::vector<ThresholdCheck> checks;
  std::vector<std::filesystem::path> files;
  bool thresholds_met() const;
  bool ok(bool check_thresholds) const;
};

/// Runs `cfg` and writes `<name>.log.csv`, `<name>.metrics.txt`,
/// `<name>.metrics.json` and `<name>.config.txt` into `out_dir`.
Outcome run_scenario(const SimConfig& cfg, const std::filesystem::path& out_dir);

/// Runs the configs on up to `jobs` threads; results keep the input order.
std::vector<Outcome> run_all(const std::vector<SimConfig>& configs,
                             const std::filesystem::path& out_dir, int jobs = 1);

/// 0 iff no run faulted and, when requested, every threshold was met.
int exit_status(const std::vector<Outcome>& outcomes, bool check_thresholds);

struct SweepRow {
  std::string value;
  engine::Metrics metrics;
  bool faulted = false;
};

/// One run of `base` per value of `key`, without logs.
std::vector<SweepRow> sweep(const SimConfig& base, std::string_view key,
                            const std::vector<std::string>& values, int jobs = 1);
std::string sweep_table(std::string_view key, const std::vector<SweepRow>& rows);

}  // namespace exosim::scenario
