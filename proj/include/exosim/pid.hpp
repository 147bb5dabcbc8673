#pragma once

namespace exosim::control {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double output_limit = 1.0;      // symmetric
  double integrator_limit = 1.0;  // clamp on the integral term itself
  double derivative_tau = 0.0;    // s, first-order filter on the derivative

  void validate() const;
};

struct PidState {
  double integrator = 0.0;  // already scaled by ki
  double derivative = 0.0;  // filtered d(measurement)/dt
  double last_measurement = 0.0;
  bool primed = false;
  double output = 0.0;
};

struct PidStep {
  PidState state;
  double output = 0.0;
  bool saturated = false;
};

/// Discrete PID with conditional integration: the integrator is frozen
/// whenever integrating would push a saturated output further into its
/// limit. The derivative acts on the filtered measurement.
PidStep pid_step(const PidGains& gains, PidState state, double error, double measurement,
                 double dt);

}  // namespace exosim::control
