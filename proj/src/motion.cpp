#include "exosim/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "exosim/errors.hpp"
#include "exosim/kv.hpp"

namespace exosim::motion {

namespace {

constexpr std::string_view kCsvHeader = "t_s,theta_b_deg,theta_t_deg,theta_s_deg";

// Fraction of the cycle completed, in [0, 1).
double phase(const TrajectoryParams& p, double t) {
  const double r = std::fmod(t, p.cycle_period) / p.cycle_period;
  return r < 0.0 ? r + 1.0 : r;
}

Posture shape(const TrajectoryParams& p, double s) {
  const double flexion = p.peak_knee_flexion * s;
  Posture out;
  out.trunk = p.peak_trunk_lean * s;
  out.thigh = -(1.0 - p.shank_share) * flexion;
  out.shank = p.shank_share * flexion;
  return out;
}

class GaussianNoise {
 public:
  GaussianNoise(std::uint64_t seed, double stddev) : engine_(seed), stddev_(stddev) {}

  double operator()() {
    if (stddev_ == 0.0) return 0.0;
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return stddev_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double stddev_;
};

std::size_t count_samples(double duration, double rate) {
  // Tolerate representation error in duration * rate (1 s at 400 Hz is 400).
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
}

}  // namespace

std::string_view to_string(LiftKind kind) {
  return kind == LiftKind::squat ? "squat" : "stoop";
}

LiftKind lift_kind_from_string(std::string_view s) {
  if (s == "squat") return LiftKind::squat;
  if (s == "stoop") return LiftKind::stoop;
  throw ConfigError("unknown lift kind '" + std::string(s) + "'");
}

TrajectoryParams TrajectoryParams::squat() { return {}; }

TrajectoryParams TrajectoryParams::stoop() {
  TrajectoryParams p;
  p.kind = LiftKind::stoop;
  p.peak_knee_flexion = deg_to_rad(25.0);
  p.peak_trunk_lean = deg_to_rad(80.0);
  return p;
}

void TrajectoryParams::validate() const {
  if (!(cycle_period > 0.0)) throw ConfigError("cycle period must be positive");
  if (n_cycles < 1) throw ConfigError("at least one cycle is required");
  if (!(shank_share >= 0.0 && shank_share <= 1.0)) throw ConfigError("shank share must be in [0, 1]");
  // Small slack so a value given in degrees survives the conversion.
  if (!(peak_knee_flexion >= 0.0 && peak_knee_flexion <= kMaxKneeFlexion * (1.0 + 1e-12))) {
    throw ConfigError("peak knee flexion must be within 0..130 deg");
  }
  if (kind == LiftKind::stoop && peak_knee_flexion > 0.2 * kMaxKneeFlexion * (1.0 + 1e-12)) {
    throw ConfigError("stoop lifting keeps knee flexion within 20% of the squat range");
  }
  if (!std::isfinite(peak_trunk_lean) || std::abs(peak_trunk_lean) > kPi / 2.0) {
    throw ConfigError("peak trunk lean must be within +/-90 deg");
  }
}

Posture true_posture(const TrajectoryParams& params, double t) {
  const double s = 0.5 * (1.0 - std::cos(2.0 * kPi * phase(params, t)));
  return shape(params, s);
}

Posture true_posture_rate(const TrajectoryParams& params, double t) {
  const double ds = kPi / params.cycle_period * std::sin(2.0 * kPi * phase(params, t));
  return shape(params, ds);
}

void ImuConfig::validate() const {
  if (!(sample_rate > 0.0)) throw ConfigError("IMU sample rate must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("IMU noise must be non-negative");
  if (!(calibration_window >= 0.0)) throw ConfigError("calibration window must be non-negative");
  if (!std::isfinite(bias)) throw ConfigError("IMU bias must be finite");
}

PostureStream imu_stream(const TrajectoryParams& params, const ImuConfig& cfg, double duration) {
  params.validate();
  cfg.validate();
  if (!(duration > 0.0)) throw ConfigError("stream duration must be positive");
  if (duration < cfg.calibration_window) {
    throw ConfigError("stream duration is shorter than the calibration window");
  }

  GaussianNoise noise(cfg.seed, cfg.noise_std);
  auto measure = [&](const Posture& truth) {
    Posture m;
    m.trunk = truth.trunk + cfg.bias + noise();
    m.thigh = truth.thigh + cfg.bias + noise();
    m.shank = truth.shank + cfg.bias + noise();
    return m;
  };

  // Subject stands straight during the window: the true posture is zero.
  const std::size_t n_cal = count_samples(cfg.calibration_window, cfg.sample_rate);
  Posture offset;
  if (n_cal > 0) {
    for (std::size_t i = 0; i < n_cal; ++i) {
      const Posture m = measure(Posture{});
      offset.trunk += m.trunk;
      offset.thigh += m.thigh;
      offset.shank += m.shank;
    }
    const double n = static_cast<double>(n_cal);
    offset.trunk /= n;
    offset.thigh /= n;
    offset.shank /= n;
  }

  const std::size_t n = count_samples(duration, cfg.sample_rate);
  PostureStream out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.sample_rate;
    const Posture m = measure(true_posture(params, t));
    out.push_back({t, {m.trunk - offset.trunk, m.thigh - offset.thigh, m.shank - offset.shank}});
  }
  return out;
}

PostureStream read_posture_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open posture file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("posture file '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw ParseError(1, "posture file header must be '" + std::string(kCsvHeader) + "'");
  }

  PostureStream out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 4> v{};
    std::istringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k >= v.size()) throw ParseError(line_no, "too many columns");
      v[k++] = kv::to_double({line_no, "posture column", cell});
    }
    if (k != v.size()) throw ParseError(line_no, "expected 4 columns");
    if (!out.empty() && !(v[0] > out.back().t)) {
      throw ParseError(line_no, "timestamps must be strictly increasing");
    }
    Posture p{deg_to_rad(v[1]), deg_to_rad(v[2]), deg_to_rad(v[3])};
    try {
      biomechanics::validate(p);
    } catch (const InvalidPosture& e) {
      throw ParseError(line_no, e.what());
    }
    out.push_back({v[0], p});
  }
  if (out.empty()) throw ConfigError("posture file '" + path.string() + "' has no samples");
  return out;
}

void write_posture_csv(const std::filesystem::path& path, const PostureStream& stream) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write posture file '" + path.string() + "'");
  out << kCsvHeader << '\n';
  for (const auto& s : stream) {
    out << kv::format(s.t) << ',' << kv::format(rad_to_deg(s.posture.trunk)) << ','
        << kv::format(rad_to_deg(s.posture.thigh)) << ',' << kv::format(rad_to_deg(s.posture.shank))
        << '\n';
  }
}

MotionSource MotionSource::prescribed(const TrajectoryParams& params) {
  params.validate();
  MotionSource m;
  m.params_ = params;
  return m;
}

MotionSource MotionSource::replay(PostureStream samples) {
  if (samples.empty()) throw ConfigError("replay needs at least one sample");
  MotionSource m;
  m.samples_ = std::move(samples);
  return m;
}

std::size_t MotionSource::segment_for(double t) const {
  // Index of the last sample at or before t.
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const ImuSample& s) { return v < s.t; });
  return it == samples_.begin() ? 0 : static_cast<std::size_t>(it - samples_.begin()) - 1;
}

Posture MotionSource::posture(double t) const {
  if (!is_replay()) return true_posture(params_, t);
  if (t <= samples_.front().t) return samples_.front().posture;
  if (t >= samples_.back().t) return samples_.back().posture;
  const std::size_t i = segment_for(t);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  const double w = (t - a.t) / (b.t - a.t);
  auto lerp = [w](double x, double y) { return x + w * (y - x); };
  return {lerp(a.posture.trunk, b.posture.trunk), lerp(a.posture.thigh, b.posture.thigh),
          lerp(a.posture.shank, b.posture.shank)};
}

KneeState MotionSource::knee(double t) const {
  if (!is_replay()) {
    const Posture p = true_posture(params_, t);
    const Posture r = true_posture_rate(params_, t);
    return {p.thigh - p.shank, r.thigh - r.shank};
  }
  const Posture p = posture(t);
  KneeState k{p.thigh - p.shank, 0.0};
  if (samples_.size() > 1 && t > samples_.front().t && t < samples_.back().t) {
    const std::size_t i = segment_for(t);
    const auto& a = samples_[i];
    const auto& b = samples_[i + 1];
    const double ka = a.posture.thigh - a.posture.shank;
    const double kb = b.posture.thigh - b.posture.shank;
    k.rate = (kb - ka) / (b.t - a.t);
  }
  return k;
}

}  // namespace exosim::motion
