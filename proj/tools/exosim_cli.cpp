#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/kv.hpp"
#include "exosim/scenario.hpp"
#include "exosim/trace_io.hpp"

namespace {

using namespace exosim;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(std::string(flag) + " expects key=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

struct Options {
  std::string scenarios = "zero-torque";
  std::string config_path;
  std::string out_dir;
  std::optional<int> cycles;
  std::optional<std::int64_t> seed;
  bool check_thresholds = false;
  std::string sweep;
  std::vector<std::string> sets;
  int jobs = 1;
  bool list_keys = false;
};

SimConfig build_config(const std::string& name, const Options& opt) {
  SimConfig cfg = scenario::apply_preset(name);
  if (!opt.config_path.empty()) {
    cfg = config::parse_config(opt.config_path, cfg);
    // Presets pin mode and gain; the file only tunes everything else.
    if (name != "custom") cfg = scenario::apply_preset(name, cfg);
  }
  for (const auto& s : opt.sets) {
    const auto [key, value] = split_assignment(s, "--set");
    config::apply(cfg, key, value);
  }
  if (opt.cycles) cfg.trajectory.n_cycles = *opt.cycles;
  if (opt.seed) {
    if (*opt.seed < 0) throw ConfigError("--seed must be non-negative");
    cfg.imu.seed = static_cast<std::uint64_t>(*opt.seed);
  }
  cfg.validate();
  return cfg;
}

void print_outcome(const scenario::Outcome& o) {
  const auto& m = o.result.metrics;
  std::cout << o.name << ": rms_error=" << kv::format(m.rms_tracking_error) << " Nm";
  if (m.rms_error_pct_of_peak) std::cout << " (" << kv::format(*m.rms_error_pct_of_peak) << "% of peak)";
  std::cout << " peak|tau_a|=" << kv::format(m.peak_abs_interface_torque)
            << " Nm mean|tau_a|=" << kv::format(m.mean_abs_interface_torque)
            << " Nm peak_ref=" << kv::format(m.peak_reference) << " Nm\n";
  if (o.result.fault) {
    std::cout << "  fault at t=" << kv::format(o.result.fault->t) << " s: " << o.result.fault->message
              << "\n";
  }
  for (const auto& c : o.checks) {
    std::cout << "  threshold " << c.threshold.metric << " in [" << kv::format(c.threshold.min)
              << ", " << kv::format(c.threshold.max) << "]: "
              << (c.value ? kv::format(*c.value) : std::string("undefined"))
              << (c.met ? " met" : " MISSED") << "\n";
  }
  for (const auto& f : o.files) std::cout << "  wrote " << f.string() << "\n";
}

int run(const Options& opt) {
  if (opt.list_keys) {
    for (const auto& k : config::known_keys()) std::cout << k << "\n";
    return 0;
  }
  std::string out_dir = opt.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("EXOSIM_OUT_DIR");
    out_dir = env && *env ? env : ".";
  }

  const auto names = split_list(opt.scenarios);
  if (names.empty()) throw ConfigError("--scenario needs at least one name");

  if (!opt.sweep.empty()) {
    const auto [key, list] = split_assignment(opt.sweep, "--sweep");
    const SimConfig base = build_config(names.front(), opt);
    const auto rows = scenario::sweep(base, key, split_list(list), opt.jobs);
    const auto table = scenario::sweep_table(key, rows);
    std::cout << table;
    std::filesystem::create_directories(out_dir);
    io::write_text(std::filesystem::path(out_dir) / (base.scenario + ".sweep.csv"), table);
    for (const auto& r : rows) {
      if (r.faulted) return 1;
    }
    return 0;
  }

  std::vector<SimConfig> configs;
  for (const auto& n : names) configs.push_back(build_config(n, opt));
  const auto outcomes = scenario::run_all(configs, out_dir, opt.jobs);
  for (const auto& o : outcomes) print_outcome(o);
  return scenario::exit_status(outcomes, opt.check_thresholds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knee exoskeleton actuator and controller simulator"};
  Options opt;
  app.add_option("--scenario", opt.scenarios,
                 "Comma-separated presets: unpowered, zero-torque, assist-10, assist-30, "
                 "assist-50, stoop-assist, custom")
      ->capture_default_str();
  app.add_option("--config", opt.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", opt.out_dir, "Output directory (default $EXOSIM_OUT_DIR or .)");
  app.add_option("--cycles", opt.cycles, "Number of lifting cycles")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Seed for sensor noise");
  app.add_flag("--check-thresholds", opt.check_thresholds,
               "Exit non-zero when a scenario misses its metric thresholds");
  app.add_option("--sweep", opt.sweep, "key=v1,v2,... one run per value");
  app.add_option("--set", opt.sets, "Override one config key (key=value), repeatable");
  app.add_option("--jobs", opt.jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--list-keys", opt.list_keys, "Print every config key and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "exosim: " << e.what() << "\n";
    return 2;
  }
}
