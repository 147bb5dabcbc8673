#include "exosim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exosim/errors.hpp"

namespace exosim::plant {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

[[noreturn]] void numerical_fault(const PlantState& s, double voltage, double load) {
  std::ostringstream ss;
  ss << "non-finite plant state: current=" << s.current << " omega=" << s.motor_velocity
     << " angle=" << s.motor_angle << " voltage=" << voltage << " load=" << load;
  throw NumericalFault(ss.str());
}

}  // namespace

double MotorParams::friction(double omega) const {
  const double x = omega / stribeck_velocity;
  const double level = coulomb_friction + (static_friction - coulomb_friction) * std::exp(-x * x);
  return level * std::tanh(omega / friction_smoothing);
}

void MotorParams::validate(double dt) const {
  require(torque_constant > 0.0 && back_emf_constant > 0.0, "motor constants must be positive");
  require(resistance > 0.0 && inductance > 0.0, "winding resistance and inductance must be positive");
  require(rotor_inertia > 0.0, "rotor inertia must be positive");
  require(viscous_damping >= 0.0, "viscous damping must be non-negative");
  require(coulomb_friction >= 0.0 && static_friction >= coulomb_friction,
          "friction levels must satisfy 0 <= coulomb <= static");
  require(stribeck_velocity > 0.0 && friction_smoothing > 0.0,
          "friction velocity scales must be positive");
  require(continuous_torque > 0.0 && voltage_limit > 0.0, "motor ratings must be positive");
  // The regularised friction slope is integrated explicitly.
  require(dt * static_friction / (friction_smoothing * rotor_inertia) < 1.0,
          "friction smoothing velocity too small for the base step");
  require(dt * resistance / inductance < 1.0, "electrical time constant too short for the base step");
}

void GearParams::validate() const {
  require(ratio > 0.0, "gear ratio must be positive");
  require(efficiency > 0.0 && efficiency <= 1.0, "gear efficiency must be in (0, 1]");
  require(smoothing_velocity > 0.0, "gear smoothing velocity must be positive");
}

double CableParams::effective_deadband() const { return std::max(0.0, backlash - pretension); }

void CableParams::validate() const {
  require(stiffness > 0.0, "cable stiffness must be positive");
  require(backlash >= 0.0, "backlash must be non-negative");
  require(friction_coefficient >= 0.0, "cable friction coefficient must be non-negative");
  require(wrap_angle >= 0.0, "wrap angle must be non-negative");
  require(viscous >= 0.0, "cable viscous loss must be non-negative");
  require(pretension >= 0.0, "pretension must be non-negative");
  require(slide_velocity > 0.0, "slide velocity must be positive");
}

void PlantParams::validate(double dt) const {
  motor.validate(dt);
  gear.validate();
  cable.validate();
  require(load_cell.limit > 0.0, "load cell limit must be positive");
  require(stop.stiffness >= 0.0, "stop stiffness must be non-negative");
}

PlantState motor_step(PlantState s, double voltage, double load_torque, double dt,
                      const MotorParams& mp, double gear_ratio, Bridge bridge) {
  if (bridge == Bridge::open) {
    s.voltage = 0.0;
    s.current = 0.0;
  } else {
    s.voltage = std::clamp(voltage, -mp.voltage_limit, mp.voltage_limit);
    const double di = (s.voltage - mp.resistance * s.current -
                       mp.back_emf_constant * s.motor_velocity) / mp.inductance;
    s.current += dt * di;
  }
  const double torque = mp.torque_constant * s.current - mp.viscous_damping * s.motor_velocity -
                        mp.friction(s.motor_velocity) - load_torque / gear_ratio;
  s.motor_velocity += dt * torque / mp.rotor_inertia;
  s.motor_angle += dt * s.motor_velocity;

  if (!std::isfinite(s.current) || !std::isfinite(s.motor_velocity) ||
      !std::isfinite(s.motor_angle)) {
    numerical_fault(s, voltage, load_torque);
  }
  return s;
}

GearOutput gearbox(double motor_torque, double motor_speed, double efficiency, double ratio) {
  // Motor delivering power: losses reduce the output. Back-driven: the
  // output must supply the losses on top of the motor torque.
  const bool forward = motor_torque * motor_speed >= 0.0;
  const double eta = forward ? efficiency : 1.0 / efficiency;
  return {motor_torque * ratio * eta, motor_speed / ratio};
}

double capstan_factor(double mu, double wrap_angle, double direction) {
  return std::exp(-mu * wrap_angle * direction);
}

CableOutput cable_transmit(double gear_angle, double gear_velocity, double pulley_angle,
                           double pulley_velocity, const CableParams& cp) {
  const double band = cp.effective_deadband();
  const double rel = gear_angle - pulley_angle;
  const double rel_rate = gear_velocity - pulley_velocity;

  CableOutput out;
  out.backlash_position = std::clamp(rel, -band, band);
  out.deflection = rel - out.backlash_position;
  if (out.deflection > 0.0) {
    // Extension strand taut; a cable cannot push.
    out.tension_torque = std::max(0.0, cp.stiffness * out.deflection + cp.viscous * rel_rate);
  } else if (out.deflection < 0.0) {
    out.tension_torque = std::min(0.0, cp.stiffness * out.deflection + cp.viscous * rel_rate);
  }

  // Sheath friction opposes sliding: the strand loses tension towards the end
  // it is being pulled from.
  const double direction = std::tanh(pulley_velocity / cp.slide_velocity) * sign(out.tension_torque);
  out.output_torque =
      out.tension_torque * capstan_factor(cp.friction_coefficient, cp.wrap_angle, direction);
  return out;
}

PlantState initial_state(const PlantParams& p, double knee_angle) {
  PlantState s;
  s.pulley_angle = knee_angle;
  s.motor_angle = knee_angle * p.gear.ratio;
  return s;
}

PlantState plant_step(const PlantState& s, double voltage, const motion::KneeState& knee,
                      double dt, const PlantParams& p, Bridge bridge) {
  const double n = p.gear.ratio;

  // Rotor load from the cable tension at the start of the step, with gear
  // losses taken in the direction of power flow.
  const double gear_velocity = s.motor_velocity / n;
  const double flow = std::tanh(gear_velocity / p.gear.smoothing_velocity) * sign(s.cable_torque);
  const double load = s.cable_torque * std::pow(p.gear.efficiency, -flow);

  PlantState next = motor_step(s, voltage, load, dt, p.motor, n, bridge);
  next.pulley_angle = knee.angle;
  next.pulley_velocity = knee.rate;

  const CableOutput c = cable_transmit(next.motor_angle / n, next.motor_velocity / n,
                                       next.pulley_angle, next.pulley_velocity, p.cable);
  next.cable_deflection = c.deflection;
  next.backlash_position = c.backlash_position;
  next.cable_torque = c.tension_torque;
  next.cable_output_torque = c.output_torque;

  // Unilateral hyperextension stop between the thigh and shank braces.
  next.stop_engaged = knee.angle > 0.0;
  const double stop = next.stop_engaged ? -p.stop.stiffness * knee.angle : 0.0;

  next.raw_interface_torque = c.output_torque + stop;
  next.interface_torque =
      std::clamp(next.raw_interface_torque, -p.load_cell.limit, p.load_cell.limit);
  next.saturated = next.interface_torque != next.raw_interface_torque;
  return next;
}

double stored_energy(const PlantState& s, const PlantParams& p) {
  const double e = s.cable_deflection;
  return 0.5 * p.motor.inductance * s.current * s.current +
         0.5 * p.motor.rotor_inertia * s.motor_velocity * s.motor_velocity +
         0.5 * p.cable.stiffness * e * e;
}

void EnergyLedger::start(const PlantState& s, const PlantParams& p) {
  *this = {};
  initial_stored = final_stored = stored_energy(s, p);
}

void EnergyLedger::record(const PlantState& before, const PlantState& after, double dt,
                          const PlantParams& p) {
  electrical_input += after.voltage * 0.5 * (before.current + after.current) * dt;
  delivered += 0.5 * (before.cable_output_torque * before.pulley_velocity +
                      after.cable_output_torque * after.pulley_velocity) * dt;
  final_stored = stored_energy(after, p);
}

}  // namespace exosim::plant
