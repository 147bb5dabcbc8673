#pragma once

#include "exosim/motion.hpp"

namespace exosim::plant {

/// Brushed-equivalent DC model of the BLDC drive. Only the 2 Nm continuous
/// rating is a hardware figure; electrical and friction constants are
/// simulator defaults.
struct MotorParams {
  double torque_constant = 0.14;     // Nm/A
  double back_emf_constant = 0.14;   // V*s/rad
  double resistance = 0.4;           // ohm
  double inductance = 0.3e-3;        // H
  double rotor_inertia = 1.2e-4;     // kg*m^2
  double viscous_damping = 3.0e-4;   // Nm*s/rad
  double coulomb_friction = 0.012;   // Nm
  double static_friction = 0.05;     // Nm, breakaway level
  double stribeck_velocity = 0.5;    // rad/s
  double friction_smoothing = 0.05;  // rad/s, tanh regularisation of sign(omega)
  double continuous_torque = 2.0;    // Nm
  double voltage_limit = 48.0;       // V

  double continuous_current() const { return continuous_torque / torque_constant; }
  /// Friction torque opposing rotation at `omega`, viscous part excluded.
  double friction(double omega) const;
  void validate(double dt) const;
};

struct GearParams {
  double ratio = 36.0;
  double efficiency = 1.0;
  double smoothing_velocity = 0.01;  // rad/s at the output, power-flow blend

  void validate() const;
};

/// Bidirectional Bowden cable reflected to the knee pulley.
struct CableParams {
  double stiffness = 400.0;            // Nm/rad
  double backlash = 0.02;              // rad, dead-band half-width
  double friction_coefficient = 0.1;   // sheath friction mu
  double wrap_angle = kPi / 2.0;       // rad of total conduit curvature
  double viscous = 0.5;                // Nm*s/rad
  double pretension = 0.015;           // rad of dead-band taken up by preload
  double slide_velocity = 0.01;        // rad/s, direction blend for the capstan law

  double effective_deadband() const;
  void validate() const;
};

struct LoadCellParams {
  double limit = 50.0;  // Nm
};

struct StopParams {
  double stiffness = 5000.0;  // Nm/rad of the hyperextension stop
};

struct PlantParams {
  MotorParams motor;
  GearParams gear;
  CableParams cable;
  LoadCellParams load_cell;
  StopParams stop;

  void validate(double dt) const;
};

/// Open: drive stage disabled, windings carry no current.
enum class Bridge { driven, open };

struct PlantState {
  double current = 0.0;           // A
  double motor_velocity = 0.0;    // rad/s
  double motor_angle = 0.0;       // rad
  double pulley_angle = 0.0;      // rad, equals the knee angle
  double pulley_velocity = 0.0;   // rad/s
  double cable_deflection = 0.0;  // rad of elastic stretch beyond the dead-band
  double backlash_position = 0.0; // rad, within +/- effective dead-band
  double cable_torque = 0.0;      // Nm at the gear end of the cable
  double cable_output_torque = 0.0;  // Nm at the pulley end
  double raw_interface_torque = 0.0;
  double interface_torque = 0.0;  // load-cell reading
  double voltage = 0.0;           // applied, after the supply clamp
  bool saturated = false;
  bool stop_engaged = false;
};

/// Advances the electrical and rotor dynamics by one semi-implicit Euler
/// step. `load_torque` is the output-side torque the gear train reflects
/// back onto the rotor. Throws NumericalFault on non-finite state.
PlantState motor_step(PlantState s, double voltage, double load_torque, double dt,
                      const MotorParams& mp, double gear_ratio = 36.0,
                      Bridge bridge = Bridge::driven);

struct GearOutput {
  double torque = 0.0;
  double speed = 0.0;
};

/// Ideal ratio with efficiency applied in the direction of power flow.
GearOutput gearbox(double motor_torque, double motor_speed, double efficiency,
                   double ratio = 36.0);

struct CableOutput {
  double deflection = 0.0;
  double backlash_position = 0.0;
  double tension_torque = 0.0;  // gear end
  double output_torque = 0.0;   // pulley end
};

/// Capstan attenuation exp(-mu * wrap * direction), direction in [-1, 1]:
/// +1 when the gear drives the pulley, -1 when the pulley back-drives.
double capstan_factor(double mu, double wrap_angle, double direction);

CableOutput cable_transmit(double gear_angle, double gear_velocity, double pulley_angle,
                           double pulley_velocity, const CableParams& cp);

/// Cable relaxed and centred, everything at rest, pulley at `knee_angle`.
PlantState initial_state(const PlantParams& p, double knee_angle);

/// One base step of the full chain against the prescribed knee motion;
/// `knee` is the human state at the end of the step.
PlantState plant_step(const PlantState& s, double voltage, const motion::KneeState& knee,
                      double dt, const PlantParams& p, Bridge bridge = Bridge::driven);

/// Energy stored in winding inductance, rotor inertia and cable stretch.
double stored_energy(const PlantState& s, const PlantParams& p);

/// Running energy balance over consecutive plant steps.
struct EnergyLedger {
  double electrical_input = 0.0;  // J supplied by the drive stage
  double delivered = 0.0;         // J delivered to the human by the cable
  double initial_stored = 0.0;
  double final_stored = 0.0;

  void start(const PlantState& s, const PlantParams& p);
  void record(const PlantState& before, const PlantState& after, double dt, const PlantParams& p);
  /// input - delivered - stored change: what was dissipated.
  double dissipated() const {
    return electrical_input - delivered - (final_stored - initial_stored);
  }
};

}  // namespace exosim::plant
