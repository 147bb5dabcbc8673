#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "exosim/biomechanics.hpp"
#include "exosim/units.hpp"

namespace exosim::motion {

using biomechanics::Posture;

enum class LiftKind { squat, stoop };

std::string_view to_string(LiftKind kind);
LiftKind lift_kind_from_string(std::string_view s);

inline constexpr double kMaxKneeFlexion = deg_to_rad(130.0);

struct TrajectoryParams {
  LiftKind kind = LiftKind::squat;
  double cycle_period = 8.0;  // s
  int n_cycles = 5;
  double peak_knee_flexion = deg_to_rad(130.0);
  double peak_trunk_lean = deg_to_rad(40.0);
  double shank_share = 0.35;  // fraction of knee flexion taken by the shank

  static TrajectoryParams squat();
  static TrajectoryParams stoop();

  void validate() const;
  double duration() const { return cycle_period * n_cycles; }
};

/// Raised-cosine lifting cycle starting and ending at upright stance.
/// Squat convention: trunk leans clockwise (positive), the thigh rotates
/// counter-clockwise (negative) and the shank clockwise, so knee flexion is
/// a negative knee angle.
Posture true_posture(const TrajectoryParams& params, double t);

/// Time derivative of true_posture.
Posture true_posture_rate(const TrajectoryParams& params, double t);

struct ImuConfig {
  double sample_rate = 400.0;       // Hz
  double noise_std = 0.0;           // rad, per axis
  double calibration_window = 0.5;  // s of upright stance before t = 0
  std::uint64_t seed = 0;
  double bias = 0.0;  // rad, constant mounting offset added to every axis

  void validate() const;
  double period() const { return 1.0 / sample_rate; }
};

/// Recorded in log headers so noisy runs can be reproduced elsewhere.
inline constexpr std::string_view kNoiseGenerator =
    "mt19937_64;uniform=(x>>11)*2^-53;normal=box-muller-cos";

struct ImuSample {
  double t = 0.0;
  Posture posture;
};

using PostureStream = std::vector<ImuSample>;

/// Samples the trajectory at the IMU rate, adds seeded noise and removes the
/// per-axis offset estimated over the upright calibration window.
PostureStream imu_stream(const TrajectoryParams& params, const ImuConfig& cfg, double duration);

/// CSV with header `t_s,theta_b_deg,theta_t_deg,theta_s_deg`.
PostureStream read_posture_csv(const std::filesystem::path& path);
void write_posture_csv(const std::filesystem::path& path, const PostureStream& stream);

struct KneeState {
  double angle = 0.0;  // rad, extension positive
  double rate = 0.0;   // rad/s
};

/// The human side seen by the plant: an ideal kinematic source.
class MotionSource {
 public:
  static MotionSource prescribed(const TrajectoryParams& params);
  /// Piecewise-linear playback of recorded postures.
  static MotionSource replay(PostureStream samples);

  KneeState knee(double t) const;
  Posture posture(double t) const;

  bool is_replay() const { return !samples_.empty(); }
  const PostureStream& samples() const { return samples_; }

 private:
  std::size_t segment_for(double t) const;

  TrajectoryParams params_;
  PostureStream samples_;
};

}  // namespace exosim::motion
