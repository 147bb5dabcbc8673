#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exosim/sim_config.hpp"

namespace exosim::engine {

enum Flag : std::uint32_t {
  kLoadCellSaturated = 1u << 0,
  kReferenceClamped = 1u << 1,
  kSensorTimeout = 1u << 2,
  kHyperextensionStop = 1u << 3,
  kNumericalFault = 1u << 4,
};

struct TraceRow {
  double t = 0.0;
  double theta_b = 0.0;  // sensed posture held by the controller
  double theta_t = 0.0;
  double theta_s = 0.0;
  double theta_k = 0.0;
  double tau_hat_k = 0.0;
  double tau_r = 0.0;
  double tau_a = 0.0;
  double omega_m = 0.0;
  double omega_r = 0.0;
  double i_a = 0.0;
  double i_r = 0.0;
  double v = 0.0;
  control::Mode mode = control::Mode::zero_torque;
  std::uint32_t flags = 0;
};

inline constexpr std::string_view kTraceColumns =
    "t,theta_b,theta_t,theta_s,theta_k,tau_hat_k,tau_r,tau_a,omega_m,omega_r,I_a,I_r,V,mode,flags";

struct TraceLog {
  std::vector<std::pair<std::string, std::string>> header;  // metadata, in order
  std::vector<TraceRow> rows;
  double row_spacing = 0.0;  // s
};

struct CycleMetrics {
  int cycle = 0;
  double rms_tracking_error = 0.0;
  double peak_abs_interface_torque = 0.0;
  double mean_abs_interface_torque = 0.0;
  double peak_reference = 0.0;
};

struct Metrics {
  double rms_tracking_error = 0.0;  // Nm
  double peak_abs_interface_torque = 0.0;
  double mean_abs_interface_torque = 0.0;
  double peak_reference = 0.0;
  std::optional<double> rms_error_pct_of_peak;  // only when peak_reference > 0
  std::int64_t samples = 0;
  double window_start = 0.0;
  std::vector<CycleMetrics> cycles;
};

/// Streaming form of `metrics`, fed one sample at a time.
class MetricsAccumulator {
 public:
  MetricsAccumulator(double settle_skip, double cycle_period);
  void add(double t, double tau_r, double tau_a);
  /// Throws MetricsError when nothing fell inside the window.
  Metrics finish() const;

 private:
  struct Sums {
    double sq_err = 0.0;
    double abs_tau = 0.0;
    double peak_tau = 0.0;
    double peak_ref = 0.0;
    std::int64_t n = 0;
    void add(double tau_r, double tau_a);
  };
  double settle_skip_;
  double cycle_period_;
  Sums window_;
  std::vector<Sums> cycles_;
};

/// RMS of tau_r - tau_a and |tau_a| statistics over rows with t >= settle_skip.
Metrics metrics(const TraceLog& log, double settle_skip, double cycle_period);

struct RunCounters {
  std::int64_t base_steps = 0;
  std::int64_t current_ticks = 0;
  std::int64_t velocity_ticks = 0;
  std::int64_t torque_ticks = 0;
  std::int64_t imu_samples = 0;
};

struct FaultRecord {
  std::int64_t step = 0;
  double t = 0.0;
  std::string message;
};

struct RunOptions {
  bool keep_log = true;
  /// Test hook: corrupts the motor state at this base step.
  std::optional<std::int64_t> inject_fault_at;
};

struct RunResult {
  TraceLog log;
  Metrics metrics;  // full-rate, independent of log decimation
  RunCounters counters;
  plant::EnergyLedger energy;
  std::optional<FaultRecord> fault;
  bool all_finite = true;
};

RunResult run(const SimConfig& cfg, const RunOptions& options = {});

}  // namespace exosim::engine
