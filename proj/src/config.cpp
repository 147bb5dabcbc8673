#include "exosim/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"
#include "exosim/units.hpp"

namespace exosim::config {

namespace {

struct Binding {
  std::string key;
  std::function<void(SimConfig&, const kv::Entry&)> set;
  std::function<std::string(const SimConfig&)> get;  // empty for input-only aliases
};

template <class Ref>
Binding number(std::string key, Ref ref) {
  return {std::move(key), [ref](SimConfig& c, const kv::Entry& e) { ref(c) = kv::to_double(e); },
          [ref](const SimConfig& c) { return kv::format(ref(c)); }};
}

template <class Ref>
Binding integer(std::string key, Ref ref) {
  return {std::move(key),
          [ref](SimConfig& c, const kv::Entry& e) {
            using T = std::remove_reference_t<decltype(ref(c))>;
            ref(c) = static_cast<T>(kv::to_int(e));
          },
          [ref](const SimConfig& c) { return std::to_string(ref(c)); }};
}

// An angle accepted as `<base>_rad` (echoed) or `<base>_deg` (input only).
template <class Ref>
void angle(std::vector<Binding>& out, const std::string& base, Ref ref) {
  out.push_back(number(base + "_rad", ref));
  out.push_back({base + "_deg",
                 [ref](SimConfig& c, const kv::Entry& e) { ref(c) = deg_to_rad(kv::to_double(e)); },
                 {}});
}

void pid_keys(std::vector<Binding>& out, const std::string& prefix,
              control::PidGains& (*gains)(SimConfig&),
              const control::PidGains& (*cgains)(const SimConfig&)) {
  auto add = [&](const char* name, double control::PidGains::*field) {
    out.push_back({prefix + name,
                   [gains, field](SimConfig& c, const kv::Entry& e) {
                     gains(c).*field = kv::to_double(e);
                   },
                   [cgains, field](const SimConfig& c) { return kv::format(cgains(c).*field); }});
  };
  add("kp", &control::PidGains::kp);
  add("ki", &control::PidGains::ki);
  add("kd", &control::PidGains::kd);
  add("limit", &control::PidGains::output_limit);
  add("integrator_limit", &control::PidGains::integrator_limit);
  add("derivative_tau", &control::PidGains::derivative_tau);
}

std::vector<Binding> make_bindings() {
  std::vector<Binding> b;

  b.push_back({"run.scenario", [](SimConfig& c, const kv::Entry& e) { c.scenario = e.value; },
               [](const SimConfig& c) { return c.scenario; }});
  b.push_back(number("run.duration_s", [](auto& c) -> auto& { return c.duration; }));
  b.push_back(integer("run.log_decimation", [](auto& c) -> auto& { return c.log_decimation; }));
  b.push_back(number("run.settle_skip_s", [](auto& c) -> auto& { return c.settle_skip; }));
  b.push_back({"run.seed",
               [](SimConfig& c, const kv::Entry& e) {
                 const auto v = kv::to_int(e);
                 if (v < 0) throw ParseError(e.line, "seed must be non-negative");
                 c.imu.seed = static_cast<std::uint64_t>(v);
               },
               [](const SimConfig& c) { return std::to_string(c.imu.seed); }});

  b.push_back(number("subject.mass_kg", [](auto& c) -> auto& { return c.subject_mass_kg; }));
  b.push_back(number("subject.height_m", [](auto& c) -> auto& { return c.subject_height_m; }));

  b.push_back(number("total.mass_kg", [](auto& c) -> auto& { return c.segments.total_mass_kg; }));
  b.push_back(number("total.height_m", [](auto& c) -> auto& { return c.segments.total_height_m; }));
  for (int i = 1; i <= anthropometry::kSegmentCount; ++i) {
    const std::string base = "segment." + std::to_string(i) + ".";
    if (i < anthropometry::kHipPivot) {
      b.push_back({base + "mass_kg",
                   [i](SimConfig& c, const kv::Entry& e) { c.segments.at(i).mass_kg = kv::to_double(e); },
                   [i](const SimConfig& c) { return kv::format(c.segments.mass(i)); }});
    }
    b.push_back({base + "com_height_m",
                 [i](SimConfig& c, const kv::Entry& e) { c.segments.at(i).height_m = kv::to_double(e); },
                 [i](const SimConfig& c) { return kv::format(c.segments.height(i)); }});
  }

  b.push_back({"motion.kind",
               [](SimConfig& c, const kv::Entry& e) {
                 try {
                   c.trajectory.kind = motion::lift_kind_from_string(e.value);
                 } catch (const ConfigError& err) {
                   throw ParseError(e.line, err.what());
                 }
               },
               [](const SimConfig& c) { return std::string(motion::to_string(c.trajectory.kind)); }});
  b.push_back(number("motion.cycle_period_s", [](auto& c) -> auto& { return c.trajectory.cycle_period; }));
  b.push_back(integer("motion.n_cycles", [](auto& c) -> auto& { return c.trajectory.n_cycles; }));
  angle(b, "motion.peak_knee_flexion", [](auto& c) -> auto& { return c.trajectory.peak_knee_flexion; });
  angle(b, "motion.peak_trunk_lean", [](auto& c) -> auto& { return c.trajectory.peak_trunk_lean; });
  b.push_back(number("motion.shank_share", [](auto& c) -> auto& { return c.trajectory.shank_share; }));
  b.push_back({"motion.replay_file", [](SimConfig& c, const kv::Entry& e) { c.replay_file = e.value; },
               [](const SimConfig& c) { return c.replay_file; }});

  b.push_back(number("imu.sample_rate_hz", [](auto& c) -> auto& { return c.imu.sample_rate; }));
  angle(b, "imu.noise_std", [](auto& c) -> auto& { return c.imu.noise_std; });
  b.push_back(number("imu.calibration_window_s", [](auto& c) -> auto& { return c.imu.calibration_window; }));
  angle(b, "imu.bias", [](auto& c) -> auto& { return c.imu.bias; });

  b.push_back(number("plant.motor.torque_constant", [](auto& c) -> auto& { return c.plant.motor.torque_constant; }));
  b.push_back(number("plant.motor.back_emf_constant", [](auto& c) -> auto& { return c.plant.motor.back_emf_constant; }));
  b.push_back(number("plant.motor.resistance", [](auto& c) -> auto& { return c.plant.motor.resistance; }));
  b.push_back(number("plant.motor.inductance", [](auto& c) -> auto& { return c.plant.motor.inductance; }));
  b.push_back(number("plant.motor.rotor_inertia", [](auto& c) -> auto& { return c.plant.motor.rotor_inertia; }));
  b.push_back(number("plant.motor.viscous_damping", [](auto& c) -> auto& { return c.plant.motor.viscous_damping; }));
  b.push_back(number("plant.motor.coulomb_friction", [](auto& c) -> auto& { return c.plant.motor.coulomb_friction; }));
  b.push_back(number("plant.motor.static_friction", [](auto& c) -> auto& { return c.plant.motor.static_friction; }));
  b.push_back(number("plant.motor.stribeck_velocity", [](auto& c) -> auto& { return c.plant.motor.stribeck_velocity; }));
  b.push_back(number("plant.motor.friction_smoothing", [](auto& c) -> auto& { return c.plant.motor.friction_smoothing; }));
  b.push_back(number("plant.motor.continuous_torque", [](auto& c) -> auto& { return c.plant.motor.continuous_torque; }));
  b.push_back(number("plant.motor.voltage_limit", [](auto& c) -> auto& { return c.plant.motor.voltage_limit; }));

  b.push_back(number("plant.gear.ratio", [](auto& c) -> auto& { return c.plant.gear.ratio; }));
  b.push_back(number("plant.gear.efficiency", [](auto& c) -> auto& { return c.plant.gear.efficiency; }));
  b.push_back(number("plant.gear.smoothing_velocity", [](auto& c) -> auto& { return c.plant.gear.smoothing_velocity; }));

  b.push_back(number("plant.cable.stiffness", [](auto& c) -> auto& { return c.plant.cable.stiffness; }));
  b.push_back(number("plant.cable.backlash", [](auto& c) -> auto& { return c.plant.cable.backlash; }));
  b.push_back(number("plant.cable.mu", [](auto& c) -> auto& { return c.plant.cable.friction_coefficient; }));
  b.push_back(number("plant.cable.wrap_angle", [](auto& c) -> auto& { return c.plant.cable.wrap_angle; }));
  b.push_back(number("plant.cable.viscous", [](auto& c) -> auto& { return c.plant.cable.viscous; }));
  b.push_back(number("plant.cable.pretension", [](auto& c) -> auto& { return c.plant.cable.pretension; }));
  b.push_back(number("plant.cable.slide_velocity", [](auto& c) -> auto& { return c.plant.cable.slide_velocity; }));
  b.push_back(number("plant.load_cell.limit", [](auto& c) -> auto& { return c.plant.load_cell.limit; }));
  b.push_back(number("plant.stop.stiffness", [](auto& c) -> auto& { return c.plant.stop.stiffness; }));

  b.push_back({"control.mode",
               [](SimConfig& c, const kv::Entry& e) {
                 try {
                   c.control.mode = control::mode_from_string(e.value);
                 } catch (const ConfigError& err) {
                   throw ParseError(e.line, err.what());
                 }
               },
               [](const SimConfig& c) { return std::string(control::to_string(c.control.mode)); }});
  b.push_back(number("control.alpha", [](auto& c) -> auto& { return c.control.alpha; }));
  b.push_back(number("control.alpha_min", [](auto& c) -> auto& { return c.control.limits.alpha_min; }));
  b.push_back(number("control.alpha_max", [](auto& c) -> auto& { return c.control.limits.alpha_max; }));
  b.push_back(number("control.reference_limit", [](auto& c) -> auto& { return c.control.limits.torque_limit; }));
  b.push_back(number("control.velocity_filter_hz", [](auto& c) -> auto& { return c.control.velocity_filter_hz; }));
  pid_keys(b, "control.torque.", [](SimConfig& c) -> control::PidGains& { return c.control.torque; },
           [](const SimConfig& c) -> const control::PidGains& { return c.control.torque; });
  pid_keys(b, "control.velocity.", [](SimConfig& c) -> control::PidGains& { return c.control.velocity; },
           [](const SimConfig& c) -> const control::PidGains& { return c.control.velocity; });
  pid_keys(b, "control.current.", [](SimConfig& c) -> control::PidGains& { return c.control.current; },
           [](const SimConfig& c) -> const control::PidGains& { return c.control.current; });
  return b;
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> b = make_bindings();
  return b;
}

}  // namespace

void apply(SimConfig& cfg, std::string_view key, std::string_view value, int line) {
  for (const auto& b : bindings()) {
    if (b.key == key) {
      b.set(cfg, kv::Entry{line, std::string(key), std::string(value)});
      return;
    }
  }
  throw UnknownKey(line, std::string(key));
}

SimConfig parse_config_text(std::string_view text, SimConfig base) {
  for (const auto& e : kv::parse(text)) apply(base, e.key, e.value, e.line);
  base.validate();
  return base;
}

SimConfig parse_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> echo(const SimConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : bindings()) {
    if (b.get) out.emplace_back(b.key, b.get(cfg));
  }
  return out;
}

std::string echo_text(const SimConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : echo(cfg)) out += k + " = " + v + "\n";
  return out;
}

SimConfig config_from_log(const std::filesystem::path& log_path) {
  std::ifstream in(log_path);
  if (!in) throw ConfigError("cannot open log '" + log_path.string() + "'");
  constexpr std::string_view marker = "# config ";
  std::string text;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.starts_with('#')) break;
    if (line.starts_with(marker)) text += line.substr(marker.size()) + "\n";
  }
  return parse_config_text(text);
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& b : bindings()) out.push_back(b.key);
  return out;
}

}  // namespace exosim::config
