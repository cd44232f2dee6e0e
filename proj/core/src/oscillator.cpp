#include "vo2snn/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "vo2snn/errors.hpp"

namespace vo2snn {

DriveWaveform DriveWaveform::constant(double v, double duration) {
  DriveWaveform w;
  w.kind = Kind::Constant;
  w.amplitude = v;
  w.duration = duration;
  return w;
}

DriveWaveform DriveWaveform::square_pulse(double amplitude, double period, double width,
                                          double duration, double offset) {
  if (period <= 0 || width <= 0 || width > period)
    raise(Errc::bad_config, "square pulse needs 0 < width <= period");
  DriveWaveform w;
  w.kind = Kind::SquarePulse;
  w.amplitude = amplitude;
  w.period = period;
  w.width = width;
  w.duration = duration;
  w.offset = offset;
  return w;
}

DriveWaveform DriveWaveform::sine(double amplitude, double period, double duration,
                                  double offset) {
  if (period <= 0) raise(Errc::bad_config, "sine needs period > 0");
  DriveWaveform w;
  w.kind = Kind::Sine;
  w.amplitude = amplitude;
  w.period = period;
  w.duration = duration;
  w.offset = offset;
  return w;
}

double DriveWaveform::at(double t) const {
  switch (kind) {
    case Kind::Constant: return amplitude;
    case Kind::SquarePulse: {
      double ph = std::fmod(t, period);
      if (ph < 0) ph += period;
      return offset + (ph < width ? amplitude : 0.0);
    }
    case Kind::Sine: return offset + amplitude * std::sin(2.0 * M_PI * t / period);
  }
  return 0.0;
}

DriveWaveform fig2_pulse(double duration) {
  return DriveWaveform::square_pulse(12.5, 200e-6, 100e-6, duration);
}

const char* response_name(Response r) {
  switch (r) {
    case Response::UnFiring: return "un-firing";
    case Response::Oscillating: return "oscillating";
    case Response::Firing: return "firing";
    case Response::Ambiguous: return "ambiguous";
  }
  return "?";
}

namespace {

struct StateDyn {
  double rp;     // r_dev + r_sample
  double kappa;  // divider from source to node equilibrium
  double tau;
};

StateDyn dyn_for(const NeuronCircuit& c, Phase ph) {
  double r_dev = ph == Phase::Insulating ? c.device.r_ins : c.device.r_met;
  StateDyn d;
  d.rp = r_dev + c.r_sample;
  d.kappa = d.rp / (c.r_series + d.rp);
  d.tau = c.c_par * (c.r_series * d.rp) / (c.r_series + d.rp);
  return d;
}

// Exact node voltage at t0+h, assuming the device state is fixed and the
// drive has no pulse edge inside (t0, t0+h).
double advance(const NeuronCircuit& c, const DriveWaveform& w, const StateDyn& d, double t0,
               double v0, double h) {
  if (w.kind == DriveWaveform::Kind::Sine) {
    double om = 2.0 * M_PI / w.period;
    double den = 1.0 + om * d.tau * om * d.tau;
    auto particular = [&](double t) {
      return w.offset * d.kappa +
             w.amplitude * d.kappa * (std::sin(om * t) - om * d.tau * std::cos(om * t)) / den;
    };
    return particular(t0 + h) + (v0 - particular(t0)) * std::exp(-h / d.tau);
  }
  double veq = w.at(t0) * d.kappa;
  return veq + (v0 - veq) * std::exp(-h / d.tau);
}

// Next square-pulse edge strictly after t (infinity for other drive kinds).
double next_drive_edge(const DriveWaveform& w, double t) {
  if (w.kind != DriveWaveform::Kind::SquarePulse) return std::numeric_limits<double>::infinity();
  double k = std::floor(t / w.period);
  for (double base = k * w.period;; base += w.period) {
    if (base + w.width > t * (1 + 1e-15) && base + w.width > t) return base + w.width;
    if (base + w.period > t) return base + w.period;
  }
}

}  // namespace

Trace simulate(const NeuronCircuit& circuit, const DriveWaveform& drive, double dt,
               std::optional<uint64_t> rng_seed) {
  if (dt <= 0) raise(Errc::bad_config, "simulate needs dt > 0");
  if (drive.duration <= 0) raise(Errc::bad_config, "simulate needs drive.duration > 0");
  const DeviceParams& dev = circuit.device;
  bool jittered = dev.jitter_sigma > 0;
  if (jittered != rng_seed.has_value())
    raise(Errc::bad_config, "rng seed must be given exactly when jitter_sigma > 0");

  std::mt19937_64 rng(rng_seed.value_or(0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double vth = dev.v_th, vh = dev.v_h;
  auto redraw = [&] {
    if (!jittered) return;
    vth = dev.v_th + dev.jitter_sigma * gauss(rng);
    vh = dev.v_h + dev.jitter_sigma * gauss(rng);
    if (vh >= vth) vh = vth - 1e-9;  // jitter must not invert the hysteresis
  };
  redraw();

  const size_t n = static_cast<size_t>(std::llround(drive.duration / dt));
  Trace tr;
  tr.dt = dt;
  tr.t.resize(n + 1);
  tr.v_node.resize(n + 1);
  tr.v_spike.resize(n + 1);
  tr.state.resize(n + 1);

  double tau_min = std::min(dyn_for(circuit, Phase::Insulating).tau,
                            dyn_for(circuit, Phase::Metallic).tau);
  if (dt > tau_min / 1000.0) {
    tr.dt_warning = true;
    std::cerr << "vo2snn: warning: dt = " << dt << " s exceeds tau_min/1000 = "
              << tau_min / 1000.0 << " s; event timing may coarsen\n";
  }

  Phase ph = Phase::Insulating;
  double V = 0.0;
  tr.t[0] = 0.0;
  tr.v_node[0] = 0.0;
  tr.v_spike[0] = 0.0;
  tr.state[0] = ph;

  // node-voltage switching boundary for the current state
  auto boundary = [&](Phase p) {
    return p == Phase::Insulating ? vth * (dev.r_ins + circuit.r_sample) / dev.r_ins
                                  : vh * (dev.r_met + circuit.r_sample) / dev.r_met;
  };
  auto crossed = [&](Phase p, double v) {
    return p == Phase::Insulating ? std::abs(v) >= boundary(p) : std::abs(v) <= boundary(p);
  };

  for (size_t i = 0; i < n; ++i) {
    double t_step_end = static_cast<double>(i + 1) * dt;
    double t_cur = static_cast<double>(i) * dt;
    for (int guard = 0; guard < 1024 && t_cur < t_step_end; ++guard) {
      double seg_end = std::min(t_step_end, next_drive_edge(drive, t_cur));
      double h = seg_end - t_cur;
      if (h <= 0) break;
      StateDyn d = dyn_for(circuit, ph);
      double v_mid = advance(circuit, drive, d, t_cur, V, 0.5 * h);
      double v_end = advance(circuit, drive, d, t_cur, V, h);
      if (!std::isfinite(v_end))
        raise(Errc::non_finite_state, "integration produced a non-finite node voltage");
      if (crossed(ph, v_mid) || crossed(ph, v_end)) {
        // bisect the crossing instant to dt/100
        double lo = 0.0, hi = crossed(ph, v_mid) ? 0.5 * h : h;
        while (hi - lo > dt / 100.0) {
          double mid = 0.5 * (lo + hi);
          if (crossed(ph, advance(circuit, drive, d, t_cur, V, mid))) hi = mid;
          else lo = mid;
        }
        V = advance(circuit, drive, d, t_cur, V, hi);
        t_cur += hi;
        if (ph == Phase::Metallic) redraw();  // cycle completes on the M->I switch
        ph = ph == Phase::Insulating ? Phase::Metallic : Phase::Insulating;
        tr.switch_events.push_back({t_cur, ph});
      } else {
        V = v_end;
        t_cur = seg_end;
      }
    }
    tr.t[i + 1] = t_step_end;
    tr.v_node[i + 1] = V;
    tr.state[i + 1] = ph;
    double rp = (ph == Phase::Insulating ? dev.r_ins : dev.r_met) + circuit.r_sample;
    tr.v_spike[i + 1] = V * circuit.r_sample / rp;
  }
  return tr;
}

double onset_voltage(const NeuronCircuit& c) {
  const DeviceParams& d = c.device;
  return d.v_th * (c.r_series + d.r_ins + c.r_sample) / d.r_ins;
}

double latch_voltage(const NeuronCircuit& c) {
  const DeviceParams& d = c.device;
  return d.v_h * (c.r_series + d.r_met + c.r_sample) / d.r_met;
}

std::optional<std::pair<double, double>> oscillation_band(const NeuronCircuit& c) {
  double lo = onset_voltage(c), hi = latch_voltage(c);
  if (hi <= lo) return std::nullopt;
  return std::make_pair(lo, hi);
}

PeriodResult closed_form_period(const NeuronCircuit& c, double v_in) {
  const DeviceParams& dev = c.device;
  StateDyn di = dyn_for(c, Phase::Insulating);
  StateDyn dm = dyn_for(c, Phase::Metallic);
  double v_up = dev.v_th * di.rp / dev.r_ins;  // node voltage at threshold
  double v_dn = dev.v_h * dm.rp / dev.r_met;   // node voltage at hold release
  double va = std::abs(v_in);
  double veq_i = va * di.kappa;
  double veq_m = va * dm.kappa;
  if (veq_i <= v_up) return {PeriodResult::Kind::StuckInsulating};
  if (veq_m >= v_dn) return {PeriodResult::Kind::StuckMetallic};
  double t_i = di.tau * std::log((veq_i - v_dn) / (veq_i - v_up));
  double t_m = dm.tau * std::log((v_up - veq_m) / (v_dn - veq_m));
  return {PeriodResult::Kind::Oscillating, t_i + t_m};
}

double default_spike_threshold(const NeuronCircuit& c) {
  const DeviceParams& d = c.device;
  double v_up = d.v_th * (d.r_ins + c.r_sample) / d.r_ins;
  return 0.5 * v_up * c.r_sample / (d.r_met + c.r_sample);
}

SpikeTrain extract_spikes(const Trace& trace, double v_thresh, double settle_frac) {
  if (v_thresh <= 0) raise(Errc::bad_config, "spike threshold must be positive");
  double dur = trace.duration();
  double t0 = settle_frac * dur;
  if (t0 >= dur) raise(Errc::window_too_short, "settle time covers the whole trace");
  SpikeTrain s;
  s.window_start = t0;
  s.window_end = dur;
  for (size_t i = 1; i < trace.v_spike.size(); ++i) {
    if (std::abs(trace.v_spike[i]) >= v_thresh && std::abs(trace.v_spike[i - 1]) < v_thresh) {
      if (trace.t[i] < t0) continue;
      s.times.push_back(trace.t[i]);
      s.polarity.push_back(trace.v_spike[i] >= 0 ? 1 : -1);
    }
  }
  s.rate = static_cast<double>(s.times.size()) / (dur - t0);
  return s;
}

Response classify_response(const Trace& trace, double settle_frac) {
  double dur = trace.duration();
  double t0 = settle_frac * dur;
  if (t0 >= dur) raise(Errc::window_too_short, "settle time covers the whole trace");
  int ups = 0, downs = 0;
  for (const auto& e : trace.switch_events) {
    if (e.t < t0) continue;
    (e.to == Phase::Metallic ? ups : downs)++;
  }
  if (ups >= 2 && downs >= 2) return Response::Oscillating;
  if (ups + downs == 0) {
    size_t i0 = std::min(trace.state.size() - 1,
                         static_cast<size_t>(std::ceil(t0 / trace.dt)));
    Phase p = trace.state[i0];
    for (size_t i = i0; i < trace.state.size(); ++i)
      if (trace.state[i] != p) return Response::Ambiguous;
    return p == Phase::Insulating ? Response::UnFiring : Response::Firing;
  }
  return Response::Ambiguous;
}

}  // namespace vo2snn
