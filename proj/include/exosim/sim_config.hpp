#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "exosim/anthropometry.hpp"
#include "exosim/control.hpp"
#include "exosim/motion.hpp"
#include "exosim/plant.hpp"

namespace exosim {

/// Model/format version written into every log and metrics file.
inline constexpr std::string_view kModelVersion = "exosim-1.0";

/// Everything a run depends on. Two runs with equal configs produce
/// byte-identical logs.
struct SimConfig {
  std::string scenario = "custom";
  double subject_mass_kg = 81.4;
  double subject_height_m = 1.784;
  anthropometry::SegmentTable segments = anthropometry::reference_segments();

  motion::TrajectoryParams trajectory;
  std::string replay_file;  // optional posture CSV replacing the generated motion
  motion::ImuConfig imu;    // imu.seed seeds all randomness in a run

  plant::PlantParams plant;
  control::ControlConfig control = control::derive_default_gains(plant::PlantParams{});

  double duration = 0.0;      // s; 0 runs trajectory.n_cycles full cycles
  int log_decimation = 20;    // base steps per logged row
  double settle_skip = -1.0;  // s excluded from metrics; negative means one cycle

  static constexpr double kBaseStep = 5e-6;

  double effective_duration() const;
  double effective_settle_skip() const;

  /// Loop schedule on the 5 us grid; throws ConfigError if the IMU period is
  /// not an exact multiple of the base step.
  control::LoopSchedule schedule() const;

  /// Throws on any violated invariant; returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

}  // namespace exosim
