#include "exosim/pid.hpp"

#include <algorithm>
#include <cmath>

#include "exosim/errors.hpp"

namespace exosim::control {

void PidGains::validate() const {
  if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) throw ConfigError("PID gains must be non-negative");
  if (!(output_limit > 0.0 && integrator_limit > 0.0)) throw ConfigError("PID limits must be positive");
  if (!(derivative_tau >= 0.0)) throw ConfigError("derivative filter time constant must be non-negative");
}

PidStep pid_step(const PidGains& g, PidState s, double error, double measurement, double dt) {
  if (!(dt > 0.0)) throw ConfigError("PID step needs dt > 0");

  if (g.kd > 0.0) {
    if (s.primed) {
      const double raw = (measurement - s.last_measurement) / dt;
      const double a = dt / (g.derivative_tau + dt);
      s.derivative += a * (raw - s.derivative);
    }
  }
  s.last_measurement = measurement;
  s.primed = true;

  const double p_term = g.kp * error;
  const double d_term = -g.kd * s.derivative;

  const double candidate =
      std::clamp(s.integrator + g.ki * error * dt, -g.integrator_limit, g.integrator_limit);
  const double unclamped = p_term + candidate + d_term;
  const bool winding_up = (unclamped > g.output_limit && error > 0.0) ||
                          (unclamped < -g.output_limit && error < 0.0);
  if (!winding_up) {
    s.integrator = candidate;
  } else if (error > 0.0) {
    // Integrate only up to the output limit, never past it.
    s.integrator = std::max(s.integrator, std::min(candidate, g.output_limit - p_term - d_term));
  } else {
    s.integrator = std::min(s.integrator, std::max(candidate, -g.output_limit - p_term - d_term));
  }

  const double raw_out = p_term + s.integrator + d_term;
  const double out = std::clamp(raw_out, -g.output_limit, g.output_limit);
  s.output = out;
  return {s, out, out != raw_out};
}

}  // namespace exosim::control
