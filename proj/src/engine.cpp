#include "exosim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/kv.hpp"

namespace exosim {

double SimConfig::effective_duration() const {
  return duration > 0.0 ? duration : trajectory.duration();
}

double SimConfig::effective_settle_skip() const {
  return settle_skip >= 0.0 ? settle_skip : trajectory.cycle_period;
}

control::LoopSchedule SimConfig::schedule() const {
  control::LoopSchedule s;
  s.base_step = kBaseStep;
  const double steps = 1.0 / (imu.sample_rate * kBaseStep);
  const auto every = static_cast<std::int64_t>(std::llround(steps));
  if (every < 1 || std::abs(steps - static_cast<double>(every)) > 1e-6) {
    throw ConfigError("IMU period " + kv::format(1.0 / imu.sample_rate) +
                      " s is not a whole number of 5 us base steps");
  }
  s.imu_every = every;
  return s;
}

std::vector<std::string> SimConfig::validate() const {
  if (!(subject_mass_kg > 0.0) || !(subject_height_m > 0.0)) {
    throw InvalidSubject("subject mass and height must be positive");
  }
  auto warnings = anthropometry::validate(segments);
  trajectory.validate();
  imu.validate();
  plant.validate(kBaseStep);
  control.validate();
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be >= 0");
  if (!(effective_duration() > 0.0)) throw ConfigError("duration must be positive");
  if (log_decimation < 1) throw ConfigError("log decimation must be >= 1");
  if (!std::isfinite(settle_skip)) throw ConfigError("settle skip must be finite");
  schedule();
  return warnings;
}

namespace engine {

void MetricsAccumulator::Sums::add(double tau_r, double tau_a) {
  const double err = tau_r - tau_a;
  sq_err += err * err;
  abs_tau += std::abs(tau_a);
  peak_tau = std::max(peak_tau, std::abs(tau_a));
  peak_ref = std::max(peak_ref, std::abs(tau_r));
  ++n;
}

MetricsAccumulator::MetricsAccumulator(double settle_skip, double cycle_period)
    : settle_skip_(settle_skip), cycle_period_(cycle_period) {}

void MetricsAccumulator::add(double t, double tau_r, double tau_a) {
  if (cycle_period_ > 0.0) {
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(t / cycle_period_)));
    if (idx >= cycles_.size()) cycles_.resize(idx + 1);
    cycles_[idx].add(tau_r, tau_a);
  }
  if (t >= settle_skip_) window_.add(tau_r, tau_a);
}

Metrics MetricsAccumulator::finish() const {
  if (window_.n == 0) throw MetricsError("metrics window is empty after the settle skip");
  Metrics m;
  const double n = static_cast<double>(window_.n);
  m.rms_tracking_error = std::sqrt(window_.sq_err / n);
  m.mean_abs_interface_torque = window_.abs_tau / n;
  m.peak_abs_interface_torque = window_.peak_tau;
  m.peak_reference = window_.peak_ref;
  if (m.peak_reference > 0.0) {
    m.rms_error_pct_of_peak = 100.0 * m.rms_tracking_error / m.peak_reference;
  }
  m.samples = window_.n;
  m.window_start = settle_skip_;
  for (std::size_t i = 0; i < cycles_.size(); ++i) {
    const auto& c = cycles_[i];
    if (c.n == 0) continue;
    const double cn = static_cast<double>(c.n);
    m.cycles.push_back({static_cast<int>(i), std::sqrt(c.sq_err / cn), c.peak_tau, c.abs_tau / cn,
                        c.peak_ref});
  }
  return m;
}

Metrics metrics(const TraceLog& log, double settle_skip, double cycle_period) {
  MetricsAccumulator acc(settle_skip, cycle_period);
  for (const auto& r : log.rows) acc.add(r.t, r.tau_r, r.tau_a);
  return acc.finish();
}

namespace {

bool row_finite(const TraceRow& r) {
  for (double v : {r.t, r.theta_b, r.theta_t, r.theta_s, r.theta_k, r.tau_hat_k, r.tau_r, r.tau_a,
                   r.omega_m, r.omega_r, r.i_a, r.i_r, r.v}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

RunResult run(const SimConfig& cfg, const RunOptions& options) {
  const auto warnings = cfg.validate();
  const auto schedule = cfg.schedule();
  const double dt = SimConfig::kBaseStep;
  const double duration = cfg.effective_duration();
  const auto n_steps = static_cast<std::int64_t>(std::llround(duration / dt));

  const auto model =
      anthropometry::build_human_model(cfg.subject_mass_kg, cfg.subject_height_m, cfg.segments);

  motion::PostureStream samples;
  motion::MotionSource source = motion::MotionSource::prescribed(cfg.trajectory);
  if (!cfg.replay_file.empty()) {
    samples = motion::read_posture_csv(cfg.replay_file);
    source = motion::MotionSource::replay(samples);
  } else {
    samples = motion::imu_stream(cfg.trajectory, cfg.imu, duration);
  }

  control::Controller controller(cfg.control, model, schedule);
  controller.set_mode(cfg.control.mode, cfg.control.alpha);

  RunResult result;
  auto& log = result.log;
  log.row_spacing = dt * cfg.log_decimation;
  log.header.emplace_back("version", std::string(kModelVersion));
  log.header.emplace_back("generator", std::string(motion::kNoiseGenerator));
  log.header.emplace_back("plant_parameters", "simulator defaults, not identified from hardware");
  for (const auto& w : warnings) log.header.emplace_back("warning", w);
  for (auto& [k, v] : config::echo(cfg)) log.header.emplace_back("config " + k, v);
  if (options.keep_log) {
    log.rows.reserve(static_cast<std::size_t>(n_steps / cfg.log_decimation + 1));
  }

  MetricsAccumulator acc(cfg.effective_settle_skip(), cfg.trajectory.cycle_period);
  plant::PlantState ps = plant::initial_state(cfg.plant, source.knee(0.0).angle);
  result.energy.start(ps, cfg.plant);

  std::size_t next_sample = 0;
  std::int64_t k = 0;
  try {
    for (; k < n_steps; ++k) {
      const double t = static_cast<double>(k) * dt;

      if (k % schedule.imu_every == 0) {
        std::optional<std::size_t> fresh;
        while (next_sample < samples.size() && samples[next_sample].t <= t + 1e-9) {
          fresh = next_sample++;
        }
        if (fresh) controller.reference_update(k, samples[*fresh].posture);
      }
      if (k % schedule.torque_every == 0) controller.torque_loop(k, ps.interface_torque);
      if (k % schedule.velocity_every == 0) controller.velocity_loop(k, ps.motor_angle);
      const double voltage = controller.current_loop(k, ps.current);

      const auto& cs = controller.state();
      acc.add(t, cs.torque_ref, ps.interface_torque);

      if (k % cfg.log_decimation == 0) {
        TraceRow row;
        row.t = t;
        row.theta_b = cs.posture.trunk;
        row.theta_t = cs.posture.thigh;
        row.theta_s = cs.posture.shank;
        row.theta_k = cs.posture.thigh - cs.posture.shank;
        row.tau_hat_k = cs.biological_torque;
        row.tau_r = cs.torque_ref;
        row.tau_a = ps.interface_torque;
        row.omega_m = ps.motor_velocity;
        row.omega_r = cs.velocity_ref;
        row.i_a = ps.current;
        row.i_r = cs.current_ref;
        row.v = voltage;
        row.mode = cs.mode;
        row.flags = (ps.saturated ? kLoadCellSaturated : 0u) |
                    (cs.reference_clamped ? kReferenceClamped : 0u) |
                    (cs.sensor_timeout ? kSensorTimeout : 0u) |
                    (ps.stop_engaged ? kHyperextensionStop : 0u);
        result.all_finite = result.all_finite && row_finite(row);
        if (options.keep_log) log.rows.push_back(row);
      }

      if (options.inject_fault_at && *options.inject_fault_at == k) {
        ps.motor_velocity = std::numeric_limits<double>::quiet_NaN();
      }
      const auto next =
          plant::plant_step(ps, voltage, source.knee(t + dt), dt, cfg.plant, controller.bridge());
      result.energy.record(ps, next, dt, cfg.plant);
      ps = next;
    }
  } catch (const NumericalFault& e) {
    result.fault = FaultRecord{k, static_cast<double>(k) * dt, e.what()};
    result.all_finite = false;
    log.header.emplace_back("fault", "step " + std::to_string(k) + ": " + e.what());
    if (options.keep_log && !log.rows.empty()) log.rows.back().flags |= kNumericalFault;
  }

  const auto& cs = controller.state();
  result.counters = {k, cs.current_ticks, cs.velocity_ticks, cs.torque_ticks, cs.imu_updates};
  try {
    result.metrics = acc.finish();
  } catch (const MetricsError&) {
    result.metrics = {};
  }
  return result;
}

}  // namespace engine
}  // namespace exosim
