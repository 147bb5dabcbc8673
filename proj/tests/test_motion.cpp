#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "exosim/errors.hpp"
#include "exosim/motion.hpp"

using namespace exosim;
using namespace exosim::motion;
using Catch::Matchers::WithinAbs;

TEST_CASE("squat starts upright and reaches full flexion mid-cycle", "[motion]") {
  const auto p = TrajectoryParams::squat();
  const auto start = true_posture(p, 0.0);
  CHECK(start.trunk == 0.0);
  CHECK(start.thigh == 0.0);
  CHECK(start.shank == 0.0);

  const auto mid = true_posture(p, 4.0);
  CHECK_THAT(mid.thigh - mid.shank, WithinAbs(-deg_to_rad(130.0), 1e-12));
  CHECK_THAT(mid.trunk, WithinAbs(deg_to_rad(40.0), 1e-12));
  CHECK_THAT(mid.shank, WithinAbs(0.35 * deg_to_rad(130.0), 1e-12));

  const auto end = true_posture(p, 8.0);
  CHECK_THAT(end.thigh, WithinAbs(0.0, 1e-12));
  CHECK(p.duration() == 40.0);
}

TEST_CASE("trajectory is periodic", "[motion]") {
  const auto p = TrajectoryParams::squat();
  for (double t : {0.3, 1.7, 5.2}) {
    const auto a = true_posture(p, t);
    const auto b = true_posture(p, t + 3 * p.cycle_period);
    CHECK_THAT(a.thigh, WithinAbs(b.thigh, 1e-12));
    CHECK_THAT(a.trunk, WithinAbs(b.trunk, 1e-12));
  }
}

TEST_CASE("rate matches a central difference", "[motion]") {
  const auto p = TrajectoryParams::squat();
  const double h = 1e-6;
  for (double t : {0.5, 2.0, 3.3, 6.1}) {
    const auto r = true_posture_rate(p, t);
    const auto a = true_posture(p, t - h);
    const auto b = true_posture(p, t + h);
    CHECK_THAT(r.thigh, WithinAbs((b.thigh - a.thigh) / (2 * h), 1e-6));
    CHECK_THAT(r.trunk, WithinAbs((b.trunk - a.trunk) / (2 * h), 1e-6));
    CHECK_THAT(r.shank, WithinAbs((b.shank - a.shank) / (2 * h), 1e-6));
  }
}

TEST_CASE("trajectory limits are enforced", "[motion]") {
  auto p = TrajectoryParams::stoop();
  CHECK_NOTHROW(p.validate());
  p.peak_knee_flexion = deg_to_rad(40.0);
  CHECK_THROWS_AS(p.validate(), ConfigError);

  auto q = TrajectoryParams::squat();
  q.peak_knee_flexion = deg_to_rad(140.0);
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = TrajectoryParams::squat();
  q.n_cycles = 0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = TrajectoryParams::squat();
  q.cycle_period = 0.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  CHECK(lift_kind_from_string("stoop") == LiftKind::stoop);
  CHECK_THROWS_AS(lift_kind_from_string("deadlift"), ConfigError);
}

TEST_CASE("IMU stream has one sample per period", "[motion]") {
  const auto s = imu_stream(TrajectoryParams::squat(), {}, 1.0);
  REQUIRE(s.size() == 400);
  CHECK(s.front().t == 0.0);
  CHECK_THAT(s[399].t, WithinAbs(0.9975, 1e-12));
  // Noise-free samples equal the true posture.
  CHECK(s[123].posture == true_posture(TrajectoryParams::squat(), s[123].t));
}

TEST_CASE("IMU noise is seeded and the upright offset is removed", "[motion]") {
  ImuConfig cfg;
  cfg.noise_std = deg_to_rad(0.5);
  cfg.bias = deg_to_rad(3.0);
  cfg.seed = 42;
  const auto p = TrajectoryParams::squat();
  const auto a = imu_stream(p, cfg, 8.0);
  const auto b = imu_stream(p, cfg, 8.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].posture == b[i].posture);

  cfg.seed = 43;
  const auto c = imu_stream(p, cfg, 8.0);
  CHECK_FALSE(a[10].posture == c[10].posture);

  // Calibration leaves at most the mean of 200 noise samples behind.
  double mean_err = 0.0;
  for (const auto& s : a) mean_err += s.posture.thigh - true_posture(p, s.t).thigh;
  mean_err /= static_cast<double>(a.size());
  CHECK(std::abs(mean_err) < deg_to_rad(0.2));
}

TEST_CASE("IMU stream needs room for calibration", "[motion]") {
  CHECK_THROWS_AS(imu_stream(TrajectoryParams::squat(), {}, 0.2), ConfigError);
  CHECK_THROWS_AS(imu_stream(TrajectoryParams::squat(), {}, 0.0), ConfigError);
}

TEST_CASE("posture CSV round-trips and replays", "[motion]") {
  const auto dir = std::filesystem::temp_directory_path() / "exosim_motion";
  std::filesystem::create_directories(dir);
  const auto path = dir / "squat.csv";
  const auto stream = imu_stream(TrajectoryParams::squat(), {}, 2.0);
  write_posture_csv(path, stream);
  const auto back = read_posture_csv(path);
  REQUIRE(back.size() == stream.size());
  CHECK_THAT(back[300].posture.thigh, WithinAbs(stream[300].posture.thigh, 1e-14));

  const auto src = MotionSource::replay(back);
  CHECK(src.is_replay());
  const double t = 0.5 * (back[10].t + back[11].t);
  const double k10 = back[10].posture.thigh - back[10].posture.shank;
  const double k11 = back[11].posture.thigh - back[11].posture.shank;
  CHECK_THAT(src.knee(t).angle, WithinAbs(0.5 * (k10 + k11), 1e-14));
  CHECK_THAT(src.knee(t).rate, WithinAbs((k11 - k10) / (back[11].t - back[10].t), 1e-9));
  CHECK(src.knee(100.0).rate == 0.0);
}

TEST_CASE("malformed posture files are rejected with line numbers", "[motion]") {
  const auto dir = std::filesystem::temp_directory_path() / "exosim_motion";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.csv";
  std::ofstream(path) << "t_s,theta_b_deg,theta_t_deg,theta_s_deg\n0,0,0,0\n0.1,1,2\n";
  try {
    read_posture_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::ofstream(path) << "t_s,theta_b_deg,theta_t_deg,theta_s_deg\n0.2,0,0,0\n0.1,0,0,0\n";
  CHECK_THROWS_AS(read_posture_csv(path), ParseError);
  std::ofstream(path) << "time,a,b,c\n";
  CHECK_THROWS_AS(read_posture_csv(path), ParseError);
}

TEST_CASE("prescribed source exposes knee angle and rate", "[motion]") {
  const auto p = TrajectoryParams::squat();
  const auto src = MotionSource::prescribed(p);
  const auto k = src.knee(2.0);
  const auto pose = true_posture(p, 2.0);
  const auto rate = true_posture_rate(p, 2.0);
  CHECK(k.angle == pose.thigh - pose.shank);
  CHECK(k.rate == rate.thigh - rate.shank);
  CHECK(k.rate < 0.0);  // flexing on the way down
}
