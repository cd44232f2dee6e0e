#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "vo2snn/device.hpp"
#include "vo2snn/errors.hpp"

using namespace vo2snn;

TEST_CASE("default table endpoints match the measured thresholds") {
  CHECK(device_params(1).v_th == doctest::Approx(6.5));
  CHECK(device_params(5).v_th == doctest::Approx(1.75));
  // interior levels interpolate linearly between the endpoints
  for (int level = 2; level <= 4; ++level) {
    double expected = 6.5 + (1.75 - 6.5) * (level - 1) / 4.0;
    CHECK(device_params(level).v_th == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(device_params(3).v_th == doctest::Approx(4.1).epsilon(0.02));
}

TEST_CASE("out-of-range levels are rejected") {
  CHECK_THROWS_WITH_AS(device_params(0), doctest::Contains("InvalidLevel"), Error);
  CHECK_THROWS_AS(device_params(6), Error);
  CHECK_THROWS_AS(device_params(-3), Error);
}

TEST_CASE("table invariants") {
  DeviceParams prev{};
  for (int level = 1; level <= 5; ++level) {
    DeviceParams p = device_params(level);
    CHECK(p.v_h < p.v_th);
    CHECK(p.r_met < p.r_ins);
    CHECK(p.r_met > 0);
    CHECK(p.jitter_sigma == doctest::Approx(0.01 * p.v_th));
    if (level > 1) {
      CHECK(p.v_th < prev.v_th);
      CHECK(p.v_th - p.v_h < prev.v_th - prev.v_h);
    }
    prev = p;
  }
}

TEST_CASE("resistance follows the state") {
  DeviceParams p = device_params(1);
  CHECK(resistance({Phase::Insulating}, p) == doctest::Approx(100e3));
  CHECK(resistance({Phase::Metallic}, p) == doctest::Approx(100.0));
  p.r_ins = 1234.5;
  CHECK(resistance({Phase::Insulating}, p) == 1234.5);
}

TEST_CASE("step_state switching and hysteresis") {
  DeviceParams p = device_params(2);
  double eps = 1e-9;
  CHECK(step_state({Phase::Insulating}, p.v_th + eps, p).phase == Phase::Metallic);
  CHECK(step_state({Phase::Insulating}, p.v_th, p).phase == Phase::Metallic);
  CHECK(step_state({Phase::Metallic}, p.v_h - eps, p).phase == Phase::Insulating);
  CHECK(step_state({Phase::Insulating}, 0.5 * (p.v_h + p.v_th), p).phase == Phase::Insulating);
  CHECK(step_state({Phase::Metallic}, 0.5 * (p.v_h + p.v_th), p).phase == Phase::Metallic);
  // symmetric in |v|
  CHECK(step_state({Phase::Insulating}, -(p.v_th + eps), p).phase == Phase::Metallic);
  CHECK(step_state({Phase::Metallic}, -(p.v_h - eps), p).phase == Phase::Insulating);
}

TEST_CASE("voltage sequences inside the window never change the state") {
  DeviceParams p = device_params(3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> inside(p.v_h + 1e-9, p.v_th - 1e-9);
  for (int trial = 0; trial < 50; ++trial) {
    DeviceState s{trial % 2 ? Phase::Metallic : Phase::Insulating};
    Phase start = s.phase;
    for (int i = 0; i < 200; ++i) {
      double sign = rng() % 2 ? 1.0 : -1.0;
      s = step_state(s, sign * inside(rng), p);
    }
    CHECK(s.phase == start);
  }
}

TEST_CASE("step_state is idempotent for constant voltage") {
  DeviceParams p = device_params(1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> any(-2.0 * p.v_th, 2.0 * p.v_th);
  for (int i = 0; i < 500; ++i) {
    double v = any(rng);
    for (Phase ph : {Phase::Insulating, Phase::Metallic}) {
      DeviceState once = step_state({ph}, v, p);
      CHECK(step_state(once, v, p).phase == once.phase);
    }
  }
}

namespace {

std::string write_temp(const std::string& body) {
  std::string path = "/tmp/vo2snn_test_devices.cfg";
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("config file overrides the built-in table per level") {
  auto path = write_temp(
      "# test table\n"
      "device.2.v_th = 5.0\n"
      "device.2.v_h = 1.0   # comment after value\n");
  DeviceParams p = device_params_from_config(path, 2);
  CHECK(p.v_th == 5.0);
  CHECK(p.v_h == 1.0);
  CHECK(p.r_ins == device_params(2).r_ins);  // untouched fields keep defaults
  DeviceParams other = device_params_from_config(path, 3);
  CHECK(other.v_th == device_params(3).v_th);
  std::remove(path.c_str());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(device_params_from_config("/nonexistent/devices.cfg", 1), Error);
  auto bad_value = write_temp("device.1.v_th = not_a_number\n");
  CHECK_THROWS_WITH_AS(device_params_from_config(bad_value, 1),
                       doctest::Contains("BadConfig"), Error);
  auto bad_field = write_temp("device.1.volts = 3\n");
  CHECK_THROWS_AS(device_params_from_config(bad_field, 1), Error);
  auto inverted = write_temp("device.1.v_h = 99\n");
  CHECK_THROWS_AS(device_params_from_config(inverted, 1), Error);
  std::remove(bad_value.c_str());
}
