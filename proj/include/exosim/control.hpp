#pragma once

#include <cstdint>
#include <string_view>

#include "exosim/anthropometry.hpp"
#include "exosim/biomechanics.hpp"
#include "exosim/pid.hpp"
#include "exosim/plant.hpp"

namespace exosim::control {

enum class Mode { power_off, zero_torque, assist };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view s);

/// Output-side speed rating of the actuator, rad/s.
inline constexpr double kRatedOutputSpeed = 4.36;

/// Loop periods as multiples of the 5 us base step: current 200 kHz,
/// velocity 20 kHz, torque 1 kHz, IMU 400 Hz.
struct LoopSchedule {
  double base_step = 5e-6;
  std::int64_t current_every = 1;
  std::int64_t velocity_every = 10;
  std::int64_t torque_every = 200;
  std::int64_t imu_every = 500;

  double period(std::int64_t every) const { return base_step * static_cast<double>(every); }
};

struct ControlConfig {
  Mode mode = Mode::zero_torque;
  double alpha = 0.0;
  biomechanics::GainLimits limits;
  PidGains torque;    // Nm error -> motor rad/s
  PidGains velocity;  // rad/s error -> A
  PidGains current;   // A error -> V
  double velocity_filter_hz = 1000.0;

  void validate() const;
};

/// Bandwidth targets used to derive the default gains.
struct TuningTargets {
  double current_hz = 2000.0;
  double velocity_hz = 200.0;
  double torque_hz = 9.0;
};

/// Gains for a decade-separated cascade:
///  - current PI cancels the winding pole, closed loop 1/(1 + s/wc) with
///    kp = L*wc, ki = R*wc;
///  - velocity PI places crossover at wv on the bare rotor, kp = J*wv/kt,
///    integral corner at wv/5;
///  - torque PI treats the velocity loop as ideal, so torque integrates
///    cable stiffness times gear velocity: kp = N*wt/k_cable, integral corner
///    at wt/4.
ControlConfig derive_default_gains(const plant::PlantParams& plant, const TuningTargets& t = {});

struct ControlState {
  Mode mode = Mode::zero_torque;
  double alpha = 0.0;
  PidState torque_pid;
  PidState velocity_pid;
  PidState current_pid;

  biomechanics::Posture posture;  // latest IMU sample, held between updates
  double biological_torque = 0.0;
  double torque_ref = 0.0;
  double velocity_ref = 0.0;
  double current_ref = 0.0;
  double voltage = 0.0;
  double velocity_estimate = 0.0;
  double last_motor_angle = 0.0;
  bool angle_primed = false;

  std::int64_t torque_ticks = 0;
  std::int64_t velocity_ticks = 0;
  std::int64_t current_ticks = 0;
  std::int64_t imu_updates = 0;
  std::int64_t last_sample_step = 0;

  bool sensor_timeout = false;
  bool reference_clamped = false;
};

/// The three nested loops plus the 400 Hz reference generator. Every entry
/// point takes the base-step index it is called at and throws SchedulerFault
/// when that index is off the loop's schedule.
class Controller {
 public:
  Controller(ControlConfig cfg, anthropometry::HumanModel model, LoopSchedule schedule = {});

  void set_mode(Mode mode, double alpha = 0.0);

  /// Fresh posture sample; recomputes the torque reference in assist mode.
  void reference_update(std::int64_t step, const biomechanics::Posture& sample);
  double torque_loop(std::int64_t step, double measured_torque);
  double velocity_loop(std::int64_t step, double motor_angle);
  double current_loop(std::int64_t step, double measured_current);

  const ControlState& state() const { return state_; }
  const ControlConfig& config() const { return cfg_; }
  const LoopSchedule& schedule() const { return schedule_; }
  plant::Bridge bridge() const;

 private:
  void check_schedule(std::int64_t step, std::int64_t every, std::int64_t ticks,
                      const char* loop) const;
  void clear_loops();
  bool assisting() const;

  ControlConfig cfg_;
  anthropometry::HumanModel model_;
  LoopSchedule schedule_;
  ControlState state_;
};

}  // namespace exosim::control
