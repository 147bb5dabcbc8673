#include "exosim/control.hpp"

#include <cmath>
#include <string>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"
#include "exosim/units.hpp"

namespace exosim::control {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::power_off: return "power_off";
    case Mode::zero_torque: return "zero_torque";
    case Mode::assist: return "assist";
  }
  return "?";
}

Mode mode_from_string(std::string_view s) {
  if (s == "power_off") return Mode::power_off;
  if (s == "zero_torque") return Mode::zero_torque;
  if (s == "assist") return Mode::assist;
  throw ConfigError("unknown control mode '" + std::string(s) + "'");
}

void ControlConfig::validate() const {
  torque.validate();
  velocity.validate();
  current.validate();
  if (!(velocity_filter_hz > 0.0)) throw ConfigError("velocity filter bandwidth must be positive");
  if (!(limits.alpha_min <= limits.alpha_max)) throw ConfigError("empty assistance gain range");
  if (!(limits.torque_limit > 0.0)) throw ConfigError("reference torque limit must be positive");
  if (!std::isfinite(alpha) || alpha < limits.alpha_min || alpha > limits.alpha_max) {
    throw GainOutOfRange("assistance gain " + kv::format(alpha) + " outside [" +
                         kv::format(limits.alpha_min) + ", " + kv::format(limits.alpha_max) + "]");
  }
}

ControlConfig derive_default_gains(const plant::PlantParams& plant, const TuningTargets& t) {
  const auto& m = plant.motor;
  const double n = plant.gear.ratio;
  const double wc = 2.0 * kPi * t.current_hz;
  const double wv = 2.0 * kPi * t.velocity_hz;
  const double wt = 2.0 * kPi * t.torque_hz;

  ControlConfig c;
  c.current.kp = m.inductance * wc;
  c.current.ki = m.resistance * wc;
  c.current.output_limit = m.voltage_limit;
  c.current.integrator_limit = m.voltage_limit;

  c.velocity.kp = m.rotor_inertia * wv / m.torque_constant;
  c.velocity.ki = c.velocity.kp * wv / 5.0;
  c.velocity.output_limit = m.continuous_current();
  c.velocity.integrator_limit = m.continuous_current();

  c.torque.kp = n * wt / plant.cable.stiffness;
  c.torque.ki = c.torque.kp * wt / 4.0;
  c.torque.output_limit = kRatedOutputSpeed * n;
  c.torque.integrator_limit = kRatedOutputSpeed * n;

  c.limits.torque_limit = m.continuous_torque * n;
  return c;
}

Controller::Controller(ControlConfig cfg, anthropometry::HumanModel model, LoopSchedule schedule)
    : cfg_(cfg), model_(model), schedule_(schedule) {
  cfg_.validate();
  state_.mode = cfg_.mode;
  state_.alpha = cfg_.alpha;
}

plant::Bridge Controller::bridge() const {
  return state_.mode == Mode::power_off ? plant::Bridge::open : plant::Bridge::driven;
}

void Controller::clear_loops() {
  state_.torque_pid = {};
  state_.velocity_pid = {};
  state_.current_pid = {};
  state_.torque_ref = 0.0;
  state_.velocity_ref = 0.0;
  state_.current_ref = 0.0;
  state_.voltage = 0.0;
}

void Controller::set_mode(Mode mode, double alpha) {
  if (mode == Mode::assist) {
    biomechanics::assistive_reference(0.0, alpha, cfg_.limits);  // range check only
  }
  const bool from_off = state_.mode == Mode::power_off;
  state_.mode = mode;
  state_.alpha = mode == Mode::assist ? alpha : 0.0;
  state_.sensor_timeout = false;
  if (mode == Mode::power_off || from_off) clear_loops();
  if (mode == Mode::zero_torque) state_.torque_ref = 0.0;
}

bool Controller::assisting() const { return state_.mode == Mode::assist; }

void Controller::check_schedule(std::int64_t step, std::int64_t every, std::int64_t ticks,
                                const char* loop) const {
  if (step != ticks * every) {
    throw SchedulerFault(std::string(loop) + " loop called at base step " + std::to_string(step) +
                         ", expected " + std::to_string(ticks * every));
  }
}

void Controller::reference_update(std::int64_t step, const biomechanics::Posture& sample) {
  if (step % schedule_.imu_every != 0) {
    throw SchedulerFault("posture update at base step " + std::to_string(step) +
                         " is not on the IMU grid");
  }
  ++state_.imu_updates;
  state_.last_sample_step = step;
  state_.posture = sample;
  state_.biological_torque = biomechanics::biological_knee_torque(model_, sample);
  if (assisting()) {
    const auto r = biomechanics::assistive_reference(state_.biological_torque, state_.alpha,
                                                     cfg_.limits);
    state_.torque_ref = r.reference;
    state_.reference_clamped = r.clamped;
  } else {
    state_.torque_ref = 0.0;
    state_.reference_clamped = false;
  }
}

double Controller::torque_loop(std::int64_t step, double measured_torque) {
  check_schedule(step, schedule_.torque_every, state_.torque_ticks, "torque");
  ++state_.torque_ticks;

  if (assisting() && step - state_.last_sample_step > 2 * schedule_.imu_every) {
    // Stale posture: drop to zero-torque tracking for the rest of the run.
    state_.sensor_timeout = true;
    state_.mode = Mode::zero_torque;
    state_.alpha = 0.0;
    state_.torque_ref = 0.0;
  }
  if (state_.mode == Mode::power_off) {
    clear_loops();
    return 0.0;
  }
  if (state_.mode == Mode::zero_torque) state_.torque_ref = 0.0;

  const double dt = schedule_.period(schedule_.torque_every);
  const auto r = pid_step(cfg_.torque, state_.torque_pid, state_.torque_ref - measured_torque,
                          measured_torque, dt);
  state_.torque_pid = r.state;
  state_.velocity_ref = r.output;
  return r.output;
}

double Controller::velocity_loop(std::int64_t step, double motor_angle) {
  check_schedule(step, schedule_.velocity_every, state_.velocity_ticks, "velocity");
  ++state_.velocity_ticks;

  const double dt = schedule_.period(schedule_.velocity_every);
  if (state_.angle_primed) {
    const double raw = (motor_angle - state_.last_motor_angle) / dt;
    const double a = 1.0 - std::exp(-2.0 * kPi * cfg_.velocity_filter_hz * dt);
    state_.velocity_estimate += a * (raw - state_.velocity_estimate);
  }
  state_.last_motor_angle = motor_angle;
  state_.angle_primed = true;

  if (state_.mode == Mode::power_off) {
    clear_loops();
    return 0.0;
  }
  const auto r = pid_step(cfg_.velocity, state_.velocity_pid,
                          state_.velocity_ref - state_.velocity_estimate,
                          state_.velocity_estimate, dt);
  state_.velocity_pid = r.state;
  state_.current_ref = r.output;
  return r.output;
}

double Controller::current_loop(std::int64_t step, double measured_current) {
  check_schedule(step, schedule_.current_every, state_.current_ticks, "current");
  ++state_.current_ticks;

  if (state_.mode == Mode::power_off) {
    clear_loops();
    return 0.0;
  }
  const double dt = schedule_.period(schedule_.current_every);
  const auto r = pid_step(cfg_.current, state_.current_pid, state_.current_ref - measured_current,
                          measured_current, dt);
  state_.current_pid = r.state;
  state_.voltage = r.output;
  return r.output;
}

}  // namespace exosim::control
