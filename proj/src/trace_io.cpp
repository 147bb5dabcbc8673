#include "exosim/trace_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"

namespace exosim::io {

namespace {

void append_row(std::string& out, const engine::TraceRow& r) {
  for (double v : {r.t, r.theta_b, r.theta_t, r.theta_s, r.theta_k, r.tau_hat_k, r.tau_r, r.tau_a,
                   r.omega_m, r.omega_r, r.i_a, r.i_r, r.v}) {
    out += kv::format(v);
    out += ',';
  }
  out += control::to_string(r.mode);
  out += ',';
  out += std::to_string(r.flags);
  out += '\n';
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

std::string log_to_string(const engine::TraceLog& log) {
  std::string out;
  out.reserve(log.rows.size() * 160 + 4096);
  for (const auto& [k, v] : log.header) out += "# " + k + " = " + v + "\n";
  out += "# row_spacing_s = " + kv::format(log.row_spacing) + "\n";
  out += engine::kTraceColumns;
  out += '\n';
  for (const auto& r : log.rows) append_row(out, r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_log(const std::filesystem::path& path, const engine::TraceLog& log) {
  write_text(path, log_to_string(log));
}

engine::TraceLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log '" + path.string() + "'");
  engine::TraceLog log;
  std::string line;
  int line_no = 0;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with("# ")) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      auto key = line.substr(2, eq - 2);
      auto value = line.substr(eq + 3);
      if (key == "row_spacing_s") {
        log.row_spacing = kv::to_double({line_no, key, value});
      } else {
        log.header.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    if (!columns_seen) {
      if (line != engine::kTraceColumns) throw ParseError(line_no, "unexpected log column header");
      columns_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 15) throw ParseError(line_no, "expected 15 log columns");
    double vals[13];
    for (int i = 0; i < 13; ++i) vals[i] = kv::to_double({line_no, "column", std::string(cells[i])});
    engine::TraceRow r;
    r.t = vals[0];
    r.theta_b = vals[1];
    r.theta_t = vals[2];
    r.theta_s = vals[3];
    r.theta_k = vals[4];
    r.tau_hat_k = vals[5];
    r.tau_r = vals[6];
    r.tau_a = vals[7];
    r.omega_m = vals[8];
    r.omega_r = vals[9];
    r.i_a = vals[10];
    r.i_r = vals[11];
    r.v = vals[12];
    r.mode = control::mode_from_string(cells[13]);
    r.flags = static_cast<std::uint32_t>(kv::to_int({line_no, "flags", std::string(cells[14])}));
    log.rows.push_back(r);
  }
  if (!columns_seen) throw Error("log '" + path.string() + "' has no column header");
  return log;
}

std::string metrics_to_text(const engine::Metrics& m) {
  std::ostringstream out;
  out << "version = " << kModelVersion << '\n';
  out << "rms_tracking_error_nm = " << kv::format(m.rms_tracking_error) << '\n';
  out << "peak_abs_interface_torque_nm = " << kv::format(m.peak_abs_interface_torque) << '\n';
  out << "mean_abs_interface_torque_nm = " << kv::format(m.mean_abs_interface_torque) << '\n';
  out << "peak_reference_nm = " << kv::format(m.peak_reference) << '\n';
  if (m.rms_error_pct_of_peak) {
    out << "rms_error_pct_of_peak = " << kv::format(*m.rms_error_pct_of_peak) << '\n';
  }
  out << "samples = " << m.samples << '\n';
  out << "window_start_s = " << kv::format(m.window_start) << '\n';
  for (const auto& c : m.cycles) {
    const std::string p = "cycle." + std::to_string(c.cycle) + ".";
    out << p << "rms_tracking_error_nm = " << kv::format(c.rms_tracking_error) << '\n';
    out << p << "peak_abs_interface_torque_nm = " << kv::format(c.peak_abs_interface_torque) << '\n';
    out << p << "mean_abs_interface_torque_nm = " << kv::format(c.mean_abs_interface_torque) << '\n';
    out << p << "peak_reference_nm = " << kv::format(c.peak_reference) << '\n';
  }
  return out.str();
}

std::string metrics_to_json(const engine::Metrics& m, const std::string& scenario) {
  nlohmann::ordered_json j;
  j["version"] = kModelVersion;
  j["scenario"] = scenario;
  j["rms_tracking_error_nm"] = m.rms_tracking_error;
  j["peak_abs_interface_torque_nm"] = m.peak_abs_interface_torque;
  j["mean_abs_interface_torque_nm"] = m.mean_abs_interface_torque;
  j["peak_reference_nm"] = m.peak_reference;
  j["rms_error_pct_of_peak"] =
      m.rms_error_pct_of_peak ? nlohmann::ordered_json(*m.rms_error_pct_of_peak) : nlohmann::ordered_json(nullptr);
  j["samples"] = m.samples;
  j["window_start_s"] = m.window_start;
  auto& cycles = j["cycles"] = nlohmann::ordered_json::array();
  for (const auto& c : m.cycles) {
    cycles.push_back({{"cycle", c.cycle},
                      {"rms_tracking_error_nm", c.rms_tracking_error},
                      {"peak_abs_interface_torque_nm", c.peak_abs_interface_torque},
                      {"mean_abs_interface_torque_nm", c.mean_abs_interface_torque},
                      {"peak_reference_nm", c.peak_reference}});
  }
  return j.dump(2) + "\n";
}

}  // namespace exosim::io
