#pragma once

#include "exosim/anthropometry.hpp"

namespace exosim::biomechanics {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Segment orientations from the trunk, thigh and shank IMUs. Radians,
/// clockwise positive, all zero at upright stance.
struct Posture {
  double trunk = 0.0;
  double thigh = 0.0;
  double shank = 0.0;

  friend bool operator==(const Posture&, const Posture&) = default;
};

/// Extension positive.
struct JointAngles {
  double knee = 0.0;
  double hip = 0.0;
};

/// Throws InvalidPosture for non-finite angles or |angle| > pi.
void validate(const Posture& p);

JointAngles joint_angles(const Posture& p);

/// Quasi-static gravitational knee moment (Nm, extension positive). Inertial
/// and velocity-product terms are neglected for slow lifting.
double biological_knee_torque(const anthropometry::HumanModel& model, const Posture& p);

struct GainLimits {
  double alpha_min = -1.0;
  double alpha_max = 1.0;
  double torque_limit = 72.0;  // actuator continuous rating, Nm
};

struct TorqueReference {
  double biological = 0.0;
  double gain = 0.0;
  double requested = 0.0;  // gain * biological, before the actuator clamp
  double reference = 0.0;
  bool clamped = false;
};

/// Scales the biological estimate by `alpha`. Throws GainOutOfRange when alpha
/// is non-finite or outside [alpha_min, alpha_max].
TorqueReference assistive_reference(double biological, double alpha,
                                    const GainLimits& limits = {});

}  // namespace exosim::biomechanics
