#include "exosim/biomechanics.hpp"

#include <algorithm>
#include <cmath>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"
#include "exosim/units.hpp"

namespace exosim::biomechanics {

void validate(const Posture& p) {
  for (double a : {p.trunk, p.thigh, p.shank}) {
    if (!std::isfinite(a)) throw InvalidPosture("posture angle is not finite");
    if (std::abs(a) > kPi) {
      throw InvalidPosture("posture angle " + kv::format(a) + " rad exceeds pi; unwrap first");
    }
  }
}

JointAngles joint_angles(const Posture& p) {
  validate(p);
  return {p.thigh - p.shank, p.thigh - p.trunk};
}

double biological_knee_torque(const anthropometry::HumanModel& m, const Posture& p) {
  validate(p);
  const double sin_trunk = std::sin(p.trunk);
  const double sin_thigh = std::sin(p.thigh);
  const double upper = m.upper_body_mass_kg * kGravity *
                       (m.upper_body_com_lever_m * sin_trunk + m.thigh_length_m * sin_thigh);
  const double thigh = m.thigh_mass_kg * kGravity * m.thigh_com_lever_m * sin_thigh;
  return -0.5 * (upper + thigh);
}

TorqueReference assistive_reference(double biological, double alpha, const GainLimits& limits) {
  if (!std::isfinite(alpha) || alpha < limits.alpha_min || alpha > limits.alpha_max) {
    throw GainOutOfRange("assistance gain " + kv::format(alpha) + " outside [" +
                         kv::format(limits.alpha_min) + ", " + kv::format(limits.alpha_max) + "]");
  }
  TorqueReference r;
  r.biological = biological;
  r.gain = alpha;
  r.requested = alpha * biological;
  r.reference = std::clamp(r.requested, -limits.torque_limit, limits.torque_limit);
  r.clamped = r.reference != r.requested;
  return r;
}

}  // namespace exosim::biomechanics
