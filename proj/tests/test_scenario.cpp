#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/scenario.hpp"
#include "exosim/trace_io.hpp"

using namespace exosim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("presets pin mode and gain", "[scenario]") {
  using control::Mode;
  CHECK(scenario::apply_preset("unpowered").control.mode == Mode::power_off);
  CHECK(scenario::apply_preset("zero-torque").control.mode == Mode::zero_torque);
  for (auto [name, alpha] : {std::pair{"assist-10", 0.1}, {"assist-30", 0.3}, {"assist-50", 0.5}}) {
    const auto cfg = scenario::apply_preset(name);
    CHECK(cfg.control.mode == Mode::assist);
    CHECK(cfg.control.alpha == alpha);
    CHECK(cfg.scenario == name);
  }
  const auto stoop = scenario::apply_preset("stoop-assist");
  CHECK(stoop.trajectory.kind == motion::LiftKind::stoop);
  CHECK_NOTHROW(stoop.validate());
  CHECK(scenario::apply_preset("custom").scenario == "custom");
  CHECK_THROWS_AS(scenario::apply_preset("assist-90"), ConfigError);
  CHECK(scenario::preset_names().size() == 7);
}

TEST_CASE("run_scenario writes log, metrics and config", "[scenario]") {
  const auto dir = std::filesystem::temp_directory_path() / "exosim_scenario";
  std::filesystem::remove_all(dir);
  SimConfig cfg = scenario::apply_preset("assist-50");
  cfg.trajectory.n_cycles = 2;
  const auto out = scenario::run_scenario(cfg, dir);
  REQUIRE(out.files.size() == 4);
  for (const auto& f : out.files) CHECK(std::filesystem::exists(f));
  CHECK(out.files[0].filename() == "assist-50.log.csv");

  const auto log = io::read_log(out.files[0]);
  CHECK(log.rows.size() == out.result.log.rows.size());
  CHECK(io::log_to_string(log) == io::log_to_string(out.result.log));

  const auto json = nlohmann::json::parse(slurp(out.files[2]));
  CHECK(json["scenario"] == "assist-50");
  CHECK(json["rms_error_pct_of_peak"].get<double>() == *out.result.metrics.rms_error_pct_of_peak);
  CHECK(json["cycles"].size() == 2);

  const auto text = slurp(out.files[1]);
  CHECK(text.find("rms_error_pct_of_peak = ") != std::string::npos);

  const auto back = config::parse_config(out.files[3]);
  CHECK(config::echo_text(back) == config::echo_text(cfg));
  CHECK(scenario::exit_status({out}, true) == 0);
}

TEST_CASE("threshold checks and exit status", "[scenario]") {
  engine::Metrics m;
  m.peak_abs_interface_torque = 2.5;
  auto checks = scenario::check(scenario::thresholds_for("unpowered"), m);
  REQUIRE(checks.size() == 1);
  CHECK(checks[0].met);
  m.peak_abs_interface_torque = 4.0;
  checks = scenario::check(scenario::thresholds_for("unpowered"), m);
  CHECK_FALSE(checks[0].met);

  scenario::Outcome o;
  o.checks = checks;
  CHECK(scenario::exit_status({o}, false) == 0);
  CHECK(scenario::exit_status({o}, true) == 1);
  o.checks.clear();
  o.result.fault = engine::FaultRecord{1, 0.0, "boom"};
  CHECK(scenario::exit_status({o}, false) == 1);

  // Undefined percentage never passes.
  engine::Metrics empty;
  CHECK_FALSE(scenario::check(scenario::thresholds_for("assist-50"), empty)[0].met);
  CHECK(scenario::thresholds_for("custom").empty());
}

TEST_CASE("sweep over an empty list is an empty table", "[scenario]") {
  const auto rows = scenario::sweep(SimConfig{}, "control.alpha", {});
  CHECK(rows.empty());
  const auto table = scenario::sweep_table("control.alpha", rows);
  CHECK(std::count(table.begin(), table.end(), '\n') == 1);
}

TEST_CASE("sweep over the assistance gain", "[scenario]") {
  SimConfig base = scenario::apply_preset("assist-50");
  base.trajectory.n_cycles = 1;
  base.settle_skip = 0.0;
  const auto rows = scenario::sweep(base, "control.alpha", {"0.1", "0.3", "0.5"}, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].value == "0.1");
  CHECK_THAT(rows[1].metrics.peak_reference, WithinRel(3.0 * rows[0].metrics.peak_reference, 1e-12));
  CHECK_THAT(rows[2].metrics.peak_reference, WithinRel(5.0 * rows[0].metrics.peak_reference, 1e-12));
  for (const auto& r : rows) CHECK_FALSE(r.faulted);
  CHECK_THROWS_AS(scenario::sweep(base, "control.gain", {"1"}), UnknownKey);
}

TEST_CASE("more sheath friction means more unpowered resistance", "[scenario]") {
  SimConfig base = scenario::apply_preset("unpowered");
  base.trajectory.n_cycles = 2;
  const auto rows = scenario::sweep(base, "plant.cable.mu", {"0", "0.05", "0.1"}, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].metrics.peak_abs_interface_torque < rows[1].metrics.peak_abs_interface_torque);
  CHECK(rows[1].metrics.peak_abs_interface_torque < rows[2].metrics.peak_abs_interface_torque);
}

TEST_CASE("parallel runs match sequential runs", "[scenario]") {
  const auto dir = std::filesystem::temp_directory_path() / "exosim_parallel";
  std::vector<SimConfig> cfgs;
  for (const char* name : {"zero-torque", "assist-10"}) {
    auto c = scenario::apply_preset(name);
    c.duration = 2.0;
    c.settle_skip = 0.0;
    cfgs.push_back(c);
  }
  const auto seq = scenario::run_all(cfgs, dir / "seq", 1);
  const auto par = scenario::run_all(cfgs, dir / "par", 2);
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    CHECK(io::log_to_string(seq[i].result.log) == io::log_to_string(par[i].result.log));
  }
}
