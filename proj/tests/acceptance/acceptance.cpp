// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is non-zero when any hard criterion fails; the calibration
// criterion is reported only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "exosim/biomechanics.hpp"
#include "exosim/control.hpp"
#include "exosim/engine.hpp"
#include "exosim/errors.hpp"
#include "exosim/plant.hpp"
#include "exosim/scenario.hpp"
#include "exosim/trace_io.hpp"

using namespace exosim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  int id;
  std::string name;
  bool hard;
  bool pass;
  std::string detail;
};

std::vector<Verdict> verdicts;

void report(int id, std::string name, bool hard, bool pass, std::string detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : (hard ? "FAIL" : "SOFT-MISS"), id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  verdicts.push_back({id, std::move(name), hard, pass, std::move(detail)});
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Quasi-static knee moment written out from the lumped model, independently
// of the library implementation.
double knee_moment_oracle(double mb, double mt, double lb, double lt, double ltc, double trunk,
                          double thigh) {
  constexpr double g = 9.81;
  const double upper = mb * g * (lb * std::sin(trunk) + lt * std::sin(thigh));
  const double lower = mt * g * ltc * std::sin(thigh);
  return -0.5 * (upper + lower);
}

void criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> mass(30.0, 150.0);
  std::uniform_real_distribution<double> height(1.3, 2.1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = anthropometry::build_human_model(mass(rng), height(rng));
    const biomechanics::Posture p{angle(rng), angle(rng), angle(rng)};
    const double want = knee_moment_oracle(m.upper_body_mass_kg, m.thigh_mass_kg,
                                           m.upper_body_com_lever_m, m.thigh_length_m,
                                           m.thigh_com_lever_m, p.trunk, p.thigh);
    const double got = biomechanics::biological_knee_torque(m, p);
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    worst = std::max(worst, rel);
  }
  const double elapsed = seconds_since(t0);
  report(1, "model-oracle equivalence", true, worst <= 1e-12 && elapsed < 1.0,
         fmt("max relative error %.3g", worst) + fmt(" over 1000 pairs in %.3f s", elapsed));
}

void criterion_2() {
  // Hand evaluation of the reference table: rows 1..8 sum to 52.2 kg with
  // first moment 64.3651 kg*m; hip pivot 0.946 m, knee pivot 0.505 m,
  // thigh CoM 0.75 m.
  const auto m = anthropometry::build_human_model(81.4, 1.784);
  struct Check {
    const char* name;
    double got, want, tol;
  };
  const Check checks[] = {
      {"M_b", m.upper_body_mass_kg, 52.2, 1e-9},
      {"M_t", m.thigh_mass_kg, 19.6, 1e-9},
      {"L_t", m.thigh_length_m, 0.441, 1e-9},
      {"L_tc", m.thigh_com_lever_m, 0.245, 1e-9},
      {"L_b", m.upper_body_com_lever_m, 0.28705, 1e-4},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : checks) {
    ok = ok && std::abs(c.got - c.want) <= c.tol;
    detail += std::string(c.name) + "=" + fmt("%.6g ", c.got);
  }
  report(2, "anthropometry hand values", true, ok, detail);
}

void criterion_3() {
  SimConfig cfg = scenario::apply_preset("assist-50");
  cfg.duration = 1.0;
  cfg.settle_skip = 0.0;
  engine::RunOptions opt;
  opt.keep_log = false;
  const auto c = engine::run(cfg, opt).counters;
  const bool ok = c.current_ticks == 200000 && c.velocity_ticks == 20000 &&
                  c.torque_ticks == 1000 && c.imu_samples == 400;
  report(3, "scheduler exactness", true, ok,
         "current " + std::to_string(c.current_ticks) + ", velocity " +
             std::to_string(c.velocity_ticks) + ", torque " + std::to_string(c.torque_ticks) +
             ", imu " + std::to_string(c.imu_samples));
}

void criterion_4(std::map<std::string, engine::RunResult>& runs) {
  const auto t0 = Clock::now();
  const std::pair<const char*, double> bars[] = {
      {"assist-50", 1.5}, {"assist-30", 1.5}, {"assist-10", 3.0}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, bar] : bars) {
    runs[name] = engine::run(scenario::apply_preset(name));
    const auto& m = runs[name].metrics;
    const double pct = m.rms_error_pct_of_peak.value_or(INFINITY);
    ok = ok && pct <= bar && !runs[name].fault;
    detail += std::string(name) + fmt(" %.3f%%", pct) + fmt(" (<= %.1f%%", bar) +
              fmt(", rms %.3f Nm", m.rms_tracking_error) + fmt(", peak ref %.2f Nm); ", m.peak_reference);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed <= 60.0;
  report(4, "tracking replication", true, ok, detail + fmt("runtime %.1f s", elapsed));
}

void criterion_5(std::map<std::string, engine::RunResult>& runs) {
  for (const char* name : {"unpowered", "zero-torque"}) runs[name] = engine::run(scenario::apply_preset(name));
  const auto& off = runs["unpowered"].metrics;
  const auto& zt = runs["zero-torque"].metrics;
  const bool ok = zt.mean_abs_interface_torque < off.mean_abs_interface_torque &&
                  zt.peak_abs_interface_torque < off.peak_abs_interface_torque &&
                  2.0 * zt.mean_abs_interface_torque <= off.mean_abs_interface_torque;
  report(5, "backdrivability ordering", true, ok,
         fmt("mean %.3f", off.mean_abs_interface_torque) +
             fmt(" -> %.3f Nm", zt.mean_abs_interface_torque) +
             fmt(" (x%.2f), ", off.mean_abs_interface_torque / zt.mean_abs_interface_torque) +
             fmt("peak %.3f", off.peak_abs_interface_torque) +
             fmt(" -> %.3f Nm", zt.peak_abs_interface_torque));
}

void criterion_6(std::map<std::string, engine::RunResult>& runs) {
  // Calibration record: unpowered peak against sheath friction and backlash
  // around the committed defaults.
  SimConfig base = scenario::apply_preset("unpowered");
  base.trajectory.n_cycles = 2;
  std::printf("    calibration sweep, unpowered peak |tau_a| (Nm), 2 cycles:\n");
  for (const auto& [key, values] :
       std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"plant.cable.mu", {"0.05", "0.1", "0.15"}},
           {"plant.cable.backlash", {"0.01", "0.02", "0.04"}}}) {
    for (const auto& row : scenario::sweep(base, key, values)) {
      std::printf("      %s = %s -> %.3f\n", key.c_str(), row.value.c_str(),
                  row.metrics.peak_abs_interface_torque);
    }
  }
  const double peak = runs["unpowered"].metrics.peak_abs_interface_torque;
  const double mean = runs["zero-torque"].metrics.mean_abs_interface_torque;
  const bool ok = peak >= 2.0 && peak <= 3.2 && mean >= 0.2 && mean <= 0.5;
  report(6, "calibration target (soft)", false, ok,
         fmt("unpowered peak %.3f Nm in [2.0, 3.2], ", peak) +
             fmt("zero-torque mean %.3f Nm in [0.2, 0.5]", mean));
}

void criterion_7_and_8(std::map<std::string, engine::RunResult>& runs) {
  bool identical = true;
  bool finite = true;
  std::string detail;
  for (const auto& name : scenario::preset_names()) {
    SimConfig cfg = scenario::apply_preset(name);
    cfg.imu.noise_std = deg_to_rad(0.2);  // exercise the noise generator too
    cfg.imu.seed = 1234;
    const auto a = engine::run(cfg);
    const auto b = engine::run(cfg);
    const bool same = io::log_to_string(a.log) == io::log_to_string(b.log);
    identical = identical && same;
    if (!same) detail += name + " differs; ";
    // Default (noise-free) configuration for the no-NaN check.
    auto it = runs.find(name);
    const auto& dflt = it != runs.end() ? it->second : (runs[name] = engine::run(scenario::apply_preset(name)));
    finite = finite && a.all_finite && !a.fault && dflt.all_finite && !dflt.fault;
  }
  report(7, "determinism", true, identical,
         identical ? "all " + std::to_string(scenario::preset_names().size()) +
                         " presets byte-identical with equal seeds"
                   : detail);

  // Passivity of the unpowered plant over the full-cycle run.
  const auto& e = runs["unpowered"].energy;
  const bool passive = e.electrical_input == 0.0 && e.delivered <= 0.0;

  // Hysteresis: net work from the knee into the cable over a closed cycle.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> mu(0.0, 0.5), cv(0.0, 2.0), bl(0.0, 0.05), amp(0.01, 0.6);
  double min_area = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    plant::CableParams cp;
    cp.friction_coefficient = mu(rng);
    cp.viscous = cv(rng);
    cp.backlash = bl(rng);
    const double a = amp(rng);
    const int n = 4000;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ph = 2.0 * kPi * i / n;
      const double angle = a * std::sin(ph);
      const double rate = a * std::cos(ph);
      const auto out = plant::cable_transmit(0.0, 0.0, angle, rate, cp);
      area -= out.output_torque * rate * (2.0 * kPi / n);
    }
    min_area = std::min(min_area, area);
  }
  const bool hysteresis = min_area >= -1e-9;

  // Controller clamps under adversarial references.
  const auto model = anthropometry::build_human_model(81.4, 1.784);
  std::uniform_real_distribution<double> ang(-kPi, kPi), meas(-1e3, 1e3), alpha(-1.0, 1.0);
  bool clamped = true;
  for (int seq = 0; seq < 100 && clamped; ++seq) {
    auto cfg = control::derive_default_gains(plant::PlantParams{});
    cfg.mode = control::Mode::assist;
    cfg.alpha = alpha(rng);
    control::Controller c(cfg, model);
    for (std::int64_t k = 0; k < 5000; ++k) {
      if (k % 500 == 0) c.reference_update(k, {ang(rng), ang(rng), ang(rng)});
      if (k % 200 == 0) c.torque_loop(k, meas(rng));
      if (k % 10 == 0) c.velocity_loop(k, meas(rng));
      c.current_loop(k, meas(rng));
      const auto& s = c.state();
      clamped = clamped && std::abs(s.torque_ref) <= cfg.limits.torque_limit &&
                std::abs(s.velocity_ref) <= cfg.torque.output_limit &&
                std::abs(s.current_ref) <= cfg.velocity.output_limit &&
                std::abs(s.voltage) <= cfg.current.output_limit;
    }
  }

  report(8, "physical sanity", true, passive && hysteresis && clamped && finite,
         std::string("passive ") + (passive ? "yes" : "no") + fmt(" (net %.3f J to human), ", e.delivered) +
             fmt("min loop area %.3g J over 200 cycles, ", min_area) +
             "clamps " + (clamped ? "held" : "violated") + " over 100 sequences, " +
             "finite " + (finite ? "yes" : "no"));
}

void criterion_9() {
  const auto ref = anthropometry::build_human_model(81.4, 1.784);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(-kPi, kPi), mass(40.0, 130.0), height(1.4, 2.0),
      alpha(-0.5, 0.5), bio(-150.0, 150.0);
  double worst_scale = 0.0;
  bool doubles = true;
  for (int i = 0; i < 500; ++i) {
    const double ms = mass(rng), hs = height(rng);
    const auto sub = anthropometry::build_human_model(ms, hs);
    const biomechanics::Posture p{angle(rng), angle(rng), angle(rng)};
    const double want = (ms / 81.4) * (hs / 1.784) * biomechanics::biological_knee_torque(ref, p);
    const double got = biomechanics::biological_knee_torque(sub, p);
    worst_scale = std::max(worst_scale, std::abs(got - want) / std::max(std::abs(want), 1e-12));

    const double a = alpha(rng), b = bio(rng);
    const auto r1 = biomechanics::assistive_reference(b, a);
    const auto r2 = biomechanics::assistive_reference(b, 2.0 * a);
    doubles = doubles && r2.requested == 2.0 * r1.requested;
  }
  report(9, "linearity", true, worst_scale <= 1e-12 && doubles,
         fmt("scaling max relative error %.3g, ", worst_scale) +
             (doubles ? "pre-clamp reference doubles exactly" : "doubling violated"));
}

}  // namespace

int main() {
  std::map<std::string, engine::RunResult> runs;
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4(runs);
    criterion_5(runs);
    criterion_6(runs);
    criterion_7_and_8(runs);
    criterion_9();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  int hard_failures = 0;
  for (const auto& v : verdicts) hard_failures += v.hard && !v.pass;
  std::printf("%d criteria, %d hard failures\n", static_cast<int>(verdicts.size()), hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
