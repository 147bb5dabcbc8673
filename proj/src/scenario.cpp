#include "exosim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/kv.hpp"
#include "exosim/trace_io.hpp"

namespace exosim::scenario {

namespace {

// Runs task(i) for every i in [0, n) on at most `jobs` threads and rethrows
// the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"unpowered", "zero-torque", "assist-10",
                                                 "assist-30", "assist-50",   "stoop-assist",
                                                 "custom"};
  return names;
}

bool is_preset(std::string_view name) {
  const auto& n = preset_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SimConfig apply_preset(std::string_view name, SimConfig base) {
  using control::Mode;
  if (!is_preset(name)) throw ConfigError("unknown scenario '" + std::string(name) + "'");
  base.scenario = std::string(name);
  if (name == "unpowered") {
    base.control.mode = Mode::power_off;
    base.control.alpha = 0.0;
  } else if (name == "zero-torque") {
    base.control.mode = Mode::zero_torque;
    base.control.alpha = 0.0;
  } else if (name == "assist-10" || name == "assist-30" || name == "assist-50") {
    base.control.mode = Mode::assist;
    base.control.alpha = std::stoi(std::string(name.substr(7))) / 100.0;
  } else if (name == "stoop-assist") {
    const int n_cycles = base.trajectory.n_cycles;
    const double period = base.trajectory.cycle_period;
    base.trajectory = motion::TrajectoryParams::stoop();
    base.trajectory.n_cycles = n_cycles;
    base.trajectory.cycle_period = period;
    base.control.mode = Mode::assist;
    base.control.alpha = 0.5;
  }
  return base;
}

std::vector<Threshold> thresholds_for(std::string_view name) {
  if (name == "unpowered") return {{"peak_abs_interface_torque_nm", 2.0, 3.2}};
  if (name == "zero-torque") return {{"mean_abs_interface_torque_nm", 0.2, 0.5}};
  if (name == "assist-10") return {{"rms_error_pct_of_peak", 0.0, 3.0}};
  if (name == "assist-30" || name == "assist-50") return {{"rms_error_pct_of_peak", 0.0, 1.5}};
  if (name == "stoop-assist") return {{"rms_error_pct_of_peak", 0.0, 3.0}};
  return {};
}

std::optional<double> metric_value(const engine::Metrics& m, std::string_view metric) {
  if (metric == "rms_tracking_error_nm") return m.rms_tracking_error;
  if (metric == "peak_abs_interface_torque_nm") return m.peak_abs_interface_torque;
  if (metric == "mean_abs_interface_torque_nm") return m.mean_abs_interface_torque;
  if (metric == "peak_reference_nm") return m.peak_reference;
  if (metric == "rms_error_pct_of_peak") return m.rms_error_pct_of_peak;
  throw Error("unknown metric '" + std::string(metric) + "'");
}

std::vector<ThresholdCheck> check(const std::vector<Threshold>& thresholds,
                                  const engine::Metrics& m) {
  std::vector<ThresholdCheck> out;
  for (const auto& t : thresholds) {
    const auto v = metric_value(m, t.metric);
    out.push_back({t, v, v && *v >= t.min && *v <= t.max});
  }
  return out;
}

bool Outcome::thresholds_met() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.met; });
}

bool Outcome::ok(bool check_thresholds) const {
  if (result.fault || !result.all_finite) return false;
  return !check_thresholds || thresholds_met();
}

Outcome run_scenario(const SimConfig& cfg, const std::filesystem::path& out_dir) {
  Outcome out;
  out.name = cfg.scenario;
  out.result = engine::run(cfg);
  out.checks = check(thresholds_for(cfg.scenario), out.result.metrics);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  const auto base = out_dir / cfg.scenario;
  const auto path = [&](const char* suffix) { return std::filesystem::path(base.string() + suffix); };

  out.files = {path(".log.csv"), path(".metrics.txt"), path(".metrics.json"), path(".config.txt")};
  io::write_log(out.files[0], out.result.log);

  std::string text = io::metrics_to_text(out.result.metrics);
  text += "scenario = " + cfg.scenario + "\n";
  text += "fault = " + (out.result.fault ? out.result.fault->message : std::string("none")) + "\n";
  for (const auto& c : out.checks) {
    text += "threshold." + c.threshold.metric + " = " + kv::format(c.threshold.min) + ".." +
            kv::format(c.threshold.max) + (c.met ? " met" : " missed") + "\n";
  }
  io::write_text(out.files[1], text);
  io::write_text(out.files[2], io::metrics_to_json(out.result.metrics, cfg.scenario));
  io::write_text(out.files[3], config::echo_text(cfg));
  return out;
}

std::vector<Outcome> run_all(const std::vector<SimConfig>& configs,
                             const std::filesystem::path& out_dir, int jobs) {
  std::vector<Outcome> out(configs.size());
  parallel_for(configs.size(), jobs,
               [&](std::size_t i) { out[i] = run_scenario(configs[i], out_dir); });
  return out;
}

int exit_status(const std::vector<Outcome>& outcomes, bool check_thresholds) {
  const bool ok = std::all_of(outcomes.begin(), outcomes.end(),
                              [&](const Outcome& o) { return o.ok(check_thresholds); });
  return ok ? 0 : 1;
}

std::vector<SweepRow> sweep(const SimConfig& base, std::string_view key,
                            const std::vector<std::string>& values, int jobs) {
  std::vector<SimConfig> configs;
  for (const auto& v : values) {
    SimConfig cfg = base;
    config::apply(cfg, key, v);
    configs.push_back(std::move(cfg));
  }
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    engine::RunOptions opts;
    opts.keep_log = false;
    const auto r = engine::run(configs[i], opts);
    rows[i] = {values[i], r.metrics, r.fault.has_value() || !r.all_finite};
  });
  return rows;
}

std::string sweep_table(std::string_view key, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << key
      << ",rms_tracking_error_nm,peak_abs_interface_torque_nm,mean_abs_interface_torque_nm,"
         "peak_reference_nm,rms_error_pct_of_peak,fault\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.value << ',' << kv::format(m.rms_tracking_error) << ','
        << kv::format(m.peak_abs_interface_torque) << ','
        << kv::format(m.mean_abs_interface_torque) << ',' << kv::format(m.peak_reference) << ','
        << (m.rms_error_pct_of_peak ? kv::format(*m.rms_error_pct_of_peak) : std::string("")) << ','
        << (r.faulted ? "yes" : "no") << '\n';
  }
  return out.str();
}

}  // namespace exosim::scenario
