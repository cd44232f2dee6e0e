#include <doctest.h>

#include <cmath>

#include "vo2snn/device.hpp"
#include "vo2snn/errors.hpp"
#include "vo2snn/transfer.hpp"

using namespace vo2snn;

namespace {

NeuronCircuit stock(int level) {
  return NeuronCircuit{device_params(level).without_jitter(), 3e3, 1.8e-9, 50.0};
}

}  // namespace

TEST_CASE("transfer knots are monotone and anchored at zero") {
  RateTransfer tr = build_transfer(stock(1));
  CHECK(tr.r_knots.front() == 0.0);
  CHECK(tr.r_max > 0.0);
  CHECK(tr.eval(tr.v_on) == 0.0);
  CHECK(tr.eval(tr.v_on - 1.0) == 0.0);                  // clamps below
  CHECK(tr.eval(tr.v_latch + 1.0) == doctest::Approx(tr.r_max));  // clamps above
  for (size_t i = 1; i < tr.r_knots.size(); ++i) {
    CHECK(tr.v_knots[i] > tr.v_knots[i - 1]);
    CHECK(tr.r_knots[i] >= tr.r_knots[i - 1]);
  }
  CHECK(tr.eval_norm(0.0) == 0.0);
  CHECK(tr.eval_norm(1.0) == doctest::Approx(1.0));
}

TEST_CASE("mid-band transfer matches a measured spike rate within 2%") {
  NeuronCircuit c = stock(1);
  RateTransfer tr = build_transfer(c);
  double v = tr.drive_for(0.5);
  PeriodResult pr = closed_form_period(c, v);
  REQUIRE(pr.oscillating());
  Trace t = simulate(c, DriveWaveform::constant(v, 120.0 * pr.period), pr.period / 1000.0);
  SpikeTrain sp = extract_spikes(t, default_spike_threshold(c));
  REQUIRE(sp.times.size() >= 3);
  double measured = (sp.times.size() - 1) / (sp.times.back() - sp.times.front());
  CHECK(std::abs(tr.eval(v) - measured) / measured <= 0.02);
}

TEST_CASE("level 5 has no oscillating band in the stock circuit") {
  CHECK_THROWS_WITH_AS(build_transfer(stock(5)), doctest::Contains("NoOscillatingBand"), Error);
}

TEST_CASE("build_transfer rejects a too-small knot count") {
  CHECK_THROWS_AS(build_transfer(stock(1), 8), Error);
}

TEST_CASE("normalized derivative is the left segment slope") {
  RateTransfer tr = build_transfer(stock(1));
  size_t n = tr.v_knots.size();
  double du = 1.0 / double(n - 1);
  // at an interior knot the left derivative applies
  double u2 = 2.0 * du;
  double left_slope = (tr.r_knots[2] - tr.r_knots[1]) / du / tr.r_max;
  CHECK(tr.deriv_norm(u2) == doctest::Approx(left_slope));
  CHECK(tr.deriv_norm(0.0) == 0.0);
  CHECK(tr.deriv_norm(1.2) == 0.0);
  CHECK(tr.deriv_norm(-0.3) == 0.0);
  // mid-segment: matches a central finite difference of eval_norm
  for (double u : {0.5 * du + 3 * du, 0.31, 0.77}) {
    double h = du / 50.0;
    double fd = (tr.eval_norm(u + h) - tr.eval_norm(u - h)) / (2 * h);
    CHECK(tr.deriv_norm(u) == doctest::Approx(fd).epsilon(1e-9));
  }
}

TEST_CASE("rate inversion is a right inverse of normalized evaluation") {
  RateTransfer tr = build_transfer(stock(2));
  for (double u : {0.05, 0.2, 0.46, 0.8, 1.0}) {
    double v = tr.norm_drive_for_rate(u);
    CHECK(tr.eval_norm(v) == doctest::Approx(u).epsilon(1e-9));
  }
  CHECK(tr.norm_drive_for_rate(0.0) == 0.0);
}
