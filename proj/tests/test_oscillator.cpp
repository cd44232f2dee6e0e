#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vo2snn/device.hpp"
#include "vo2snn/errors.hpp"
#include "vo2snn/oscillator.hpp"

using namespace vo2snn;

namespace {

NeuronCircuit stock_circuit(int level) {
  return NeuronCircuit{device_params(level).without_jitter(), 3e3, 1.8e-9, 50.0};
}

// mean steady period from the simulated up-switch times
double simulated_period(const Trace& tr, double settle) {
  std::vector<double> ups;
  for (const auto& e : tr.switch_events)
    if (e.to == Phase::Metallic && e.t >= settle) ups.push_back(e.t);
  REQUIRE(ups.size() >= 2);
  return (ups.back() - ups.front()) / double(ups.size() - 1);
}

}  // namespace

TEST_CASE("unpowered circuit produces a zero trace with no events") {
  auto tr = simulate(stock_circuit(1), DriveWaveform::constant(0.0, 50e-6), 5e-8);
  CHECK(tr.switch_events.empty());
  for (double v : tr.v_node) CHECK(v == 0.0);
  for (double v : tr.v_spike) CHECK(v == 0.0);
  CHECK(classify_response(tr) == Response::UnFiring);
}

TEST_CASE("simulated period matches the closed form within 1% at dt = T/1000") {
  for (int level = 1; level <= 4; ++level) {
    NeuronCircuit c = stock_circuit(level);
    auto band = oscillation_band(c);
    REQUIRE(band);
    for (double q : {0.25, 0.5, 0.75}) {
      double v = band->first + q * (band->second - band->first);
      PeriodResult pr = closed_form_period(c, v);
      REQUIRE(pr.oscillating());
      auto tr = simulate(c, DriveWaveform::constant(v, 30.0 * pr.period), pr.period / 1000.0);
      double t_sim = simulated_period(tr, 5.0 * pr.period);
      CHECK(std::abs(t_sim - pr.period) / pr.period < 0.01);
    }
  }
}

TEST_CASE("closed form stuck modes") {
  NeuronCircuit c = stock_circuit(1);
  CHECK(closed_form_period(c, 0.0).kind == PeriodResult::Kind::StuckInsulating);
  CHECK(closed_form_period(c, 2.0).kind == PeriodResult::Kind::StuckInsulating);
  CHECK(closed_form_period(c, 500.0).kind == PeriodResult::Kind::StuckMetallic);
}

TEST_CASE("fine-step self-consistency at dt = T/10^4") {
  NeuronCircuit c = stock_circuit(1);
  auto band = oscillation_band(c);
  double v = 0.5 * (band->first + band->second);
  PeriodResult pr = closed_form_period(c, v);
  auto tr = simulate(c, DriveWaveform::constant(v, 25.0 * pr.period), pr.period / 1e4);
  CHECK(std::abs(simulated_period(tr, 4.0 * pr.period) - pr.period) / pr.period <= 1e-3);
}

TEST_CASE("event location error decreases with order >= 1 in dt") {
  NeuronCircuit c = stock_circuit(2);
  auto band = oscillation_band(c);
  double v = band->first + 0.4 * (band->second - band->first);
  double T = closed_form_period(c, v).period;
  std::vector<double> dts{T / 250.0, T / 1000.0, T / 4000.0}, errs;
  for (double dt : dts) {
    auto tr = simulate(c, DriveWaveform::constant(v, 30.0 * T), dt);
    errs.push_back(std::abs(simulated_period(tr, 5.0 * T) - T));
  }
  // within-run averaging keeps a noise floor; require improvement and a
  // log-log slope of at least ~1 across the 16x dt range
  CHECK(errs[2] < errs[0]);
  double slope = std::log(errs[0] / errs[2]) / std::log(dts[0] / dts[2]);
  CHECK(slope > 0.8);
}

TEST_CASE("level 5 does not oscillate under the 12.5 V pulse preset") {
  NeuronCircuit c = stock_circuit(5);
  auto tr = simulate(c, fig2_pulse(), 1e-8);
  CHECK(tr.switch_events.empty());
  CHECK(classify_response(tr) == Response::UnFiring);
  CHECK_FALSE(oscillation_band(c));
}

TEST_CASE("levels 1-4 oscillate under the 12.5 V pulse preset") {
  for (int level = 1; level <= 4; ++level) {
    auto tr = simulate(stock_circuit(level), fig2_pulse(), 2e-9);
    int ups = 0;
    for (const auto& e : tr.switch_events) ups += e.to == Phase::Metallic;
    CHECK(ups >= 10);
  }
}

TEST_CASE("pulsed drive integrates across pulses and fires off the edges") {
  // 4 us period, 2 us width square drive
  NeuronCircuit c = stock_circuit(1);
  auto drive = DriveWaveform::square_pulse(15.0, 4e-6, 2e-6, 120e-6);
  auto tr = simulate(c, drive, 1e-9);
  auto spikes = extract_spikes(tr, default_spike_threshold(c));
  REQUIRE(spikes.times.size() >= 3);
  // charge for one spike accumulates over more than one pulse period
  double mean_isi =
      (spikes.times.back() - spikes.times.front()) / double(spikes.times.size() - 1);
  CHECK(mean_isi > 4e-6);
  // spikes fall away from the pulse edges, not on them
  for (double t : spikes.times) {
    double ph = std::fmod(t, 4e-6);
    double d_edge = std::min({ph, std::abs(ph - 2e-6), 4e-6 - ph});
    CHECK(d_edge > 0.05e-6);
  }
}

TEST_CASE("sine drive emits both spike polarities") {
  NeuronCircuit c = stock_circuit(1);
  auto drive = DriveWaveform::sine(12.5, 2e-3, 2e-3);
  auto tr = simulate(c, drive, 2e-8);
  auto spikes = extract_spikes(tr, default_spike_threshold(c), 0.0);
  REQUIRE(!spikes.times.empty());
  CHECK(std::count(spikes.polarity.begin(), spikes.polarity.end(), 1) > 0);
  CHECK(std::count(spikes.polarity.begin(), spikes.polarity.end(), -1) > 0);
  // polarity follows the drive half-cycle
  for (size_t i = 0; i < spikes.times.size(); ++i) {
    double d = drive.at(spikes.times[i]);
    if (std::abs(d) > 1.0) CHECK(spikes.polarity[i] == (d > 0 ? 1 : -1));
  }
}

TEST_CASE("negating the drive negates the trace") {
  NeuronCircuit c = stock_circuit(2);
  auto pos = DriveWaveform::square_pulse(12.0, 20e-6, 10e-6, 60e-6);
  auto neg = DriveWaveform::square_pulse(-12.0, 20e-6, 10e-6, 60e-6);
  auto tp = simulate(c, pos, 5e-9), tn = simulate(c, neg, 5e-9);
  REQUIRE(tp.v_node.size() == tn.v_node.size());
  for (size_t i = 0; i < tp.v_node.size(); ++i) {
    CHECK(tp.v_node[i] == -tn.v_node[i]);
    CHECK(tp.state[i] == tn.state[i]);
  }
}

TEST_CASE("identical seeds give bit-identical jittered traces") {
  NeuronCircuit c{device_params(1), 3e3, 1.8e-9, 50.0};  // jitter = 1% of v_th
  auto a = simulate(c, DriveWaveform::constant(10.0, 60e-6), 5e-9, 123);
  auto b = simulate(c, DriveWaveform::constant(10.0, 60e-6), 5e-9, 123);
  CHECK(a.v_node == b.v_node);
  REQUIRE(a.switch_events.size() == b.switch_events.size());
  for (size_t i = 0; i < a.switch_events.size(); ++i)
    CHECK(a.switch_events[i].t == b.switch_events[i].t);
  auto other = simulate(c, DriveWaveform::constant(10.0, 60e-6), 5e-9, 124);
  CHECK(other.v_node != a.v_node);
}

TEST_CASE("seed is required exactly when jitter is enabled") {
  NeuronCircuit jittered{device_params(1), 3e3, 1.8e-9, 50.0};
  CHECK_THROWS_AS(simulate(jittered, DriveWaveform::constant(10.0, 1e-6), 1e-9), Error);
  NeuronCircuit quiet = stock_circuit(1);
  CHECK_THROWS_AS(simulate(quiet, DriveWaveform::constant(10.0, 1e-6), 1e-9, 5), Error);
}

TEST_CASE("v_spike equals the sampling divider at every sample") {
  NeuronCircuit c = stock_circuit(1);
  auto band = oscillation_band(c);
  double v = 0.5 * (band->first + band->second);
  auto tr = simulate(c, DriveWaveform::constant(v, 40e-6), 5e-9);
  for (size_t i = 0; i < tr.t.size(); i += 7) {
    double r_dev = tr.state[i] == Phase::Metallic ? c.device.r_met : c.device.r_ins;
    CHECK(tr.v_spike[i] == tr.v_node[i] * c.r_sample / (r_dev + c.r_sample));
  }
}

TEST_CASE("non-finite drive raises NonFiniteState") {
  NeuronCircuit c = stock_circuit(1);
  auto bad = DriveWaveform::constant(std::numeric_limits<double>::quiet_NaN(), 1e-6);
  CHECK_THROWS_AS(simulate(c, bad, 1e-8), Error);
}

TEST_CASE("extract_spikes counts floor(window/T) give or take one") {
  NeuronCircuit c = stock_circuit(3);
  auto band = oscillation_band(c);
  double v = band->first + 0.5 * (band->second - band->first);
  double T = closed_form_period(c, v).period;
  auto tr = simulate(c, DriveWaveform::constant(v, 40.0 * T), T / 1500.0);
  auto spikes = extract_spikes(tr, default_spike_threshold(c));
  double window = tr.duration() - spikes.window_start;
  CHECK(std::abs(double(spikes.times.size()) - std::floor(window / T)) <= 1.0);
  CHECK(spikes.rate == doctest::Approx(double(spikes.times.size()) / window));
}

TEST_CASE("extract_spikes rejects a settle window covering the trace") {
  auto tr = simulate(stock_circuit(1), DriveWaveform::constant(0.0, 1e-6), 1e-8);
  CHECK_THROWS_AS(extract_spikes(tr, 0.1, 1.0), Error);
  CHECK(extract_spikes(tr, 0.1).times.empty());
  CHECK(extract_spikes(tr, 0.1).rate == 0.0);
}

TEST_CASE("classification of the three constant-drive regimes") {
  NeuronCircuit c = stock_circuit(1);
  auto run = [&](double v, double dur, double dt) {
    return classify_response(simulate(c, DriveWaveform::constant(v, dur), dt));
  };
  CHECK(run(0.0, 40e-6, 1e-8) == Response::UnFiring);
  double v_mid = 0.5 * (onset_voltage(c) + latch_voltage(c));
  double T = closed_form_period(c, v_mid).period;
  CHECK(run(v_mid, 30.0 * T, T / 800.0) == Response::Oscillating);
  CHECK(run(latch_voltage(c) + 5.0, 40e-6, 1e-8) == Response::Firing);
  // a trace shorter than one period cannot be classified
  CHECK(run(v_mid, 0.4 * T, T / 800.0) == Response::Ambiguous);
}

TEST_CASE("classify(simulate) agrees with the closed form on a 20x20 grid") {
  DeviceParams dev = device_params(1).without_jitter();
  for (int ir = 0; ir < 20; ++ir) {
    double r = 600.0 * std::pow(40e3 / 600.0, ir / 19.0);
    NeuronCircuit c{dev, r, 1.8e-9, 50.0};
    for (int iv = 0; iv < 20; ++iv) {
      double v = 1.5 + (14.5 - 1.5) * iv / 19.0;
      PeriodResult pr = closed_form_period(c, v);
      Response expect = pr.oscillating() ? Response::Oscillating
                        : pr.kind == PeriodResult::Kind::StuckInsulating ? Response::UnFiring
                                                                         : Response::Firing;
      double dur, dt;
      if (pr.oscillating()) {
        dur = 16.0 * pr.period;
        dt = pr.period / 500.0;
      } else {
        double tau = 1.8e-9 * (r * (dev.r_ins + 50.0)) / (r + dev.r_ins + 50.0);
        dur = 30.0 * tau;
        dt = dur / 3000.0;
      }
      CAPTURE(r);
      CAPTURE(v);
      CHECK(classify_response(simulate(c, DriveWaveform::constant(v, dur), dt)) == expect);
    }
  }
}
