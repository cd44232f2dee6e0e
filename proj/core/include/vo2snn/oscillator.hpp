#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vo2snn/device.hpp"

namespace vo2snn {

// Relaxation-oscillator neuron: source -> series resistor -> capacitor node
// -> device in series with a small spike-sampling resistor -> ground.
struct NeuronCircuit {
  DeviceParams device;
  double r_series = 3e3;    // matching resistor [ohm]
  double c_par = 1.8e-9;    // parallel capacitor [F]
  double r_sample = 50.0;   // spike-sampling resistor [ohm]
};

struct DriveWaveform {
  enum class Kind { Constant, SquarePulse, Sine };
  Kind kind = Kind::Constant;
  double duration = 0.0;   // [s]
  double amplitude = 0.0;  // constant value / pulse height / sine amplitude [V]
  double period = 0.0;     // [s], pulse or sine period
  double width = 0.0;      // [s], pulse high time
  double offset = 0.0;     // [V] baseline added to the waveform

  static DriveWaveform constant(double v, double duration);
  static DriveWaveform square_pulse(double amplitude, double period, double width,
                                    double duration, double offset = 0.0);
  static DriveWaveform sine(double amplitude, double period, double duration,
                            double offset = 0.0);

  double at(double t) const;
};

// The Fig-2 style drive: 12.5 V square pulse, 100 us wide, 200 us period.
DriveWaveform fig2_pulse(double duration = 200e-6);

struct SwitchEvent {
  double t;
  Phase to;
};

struct Trace {
  double dt = 0.0;
  std::vector<double> t;        // sample times, t[i] = i*dt
  std::vector<double> v_node;   // capacitor node voltage V_osci
  std::vector<double> v_spike;  // voltage across r_sample
  std::vector<Phase> state;
  std::vector<SwitchEvent> switch_events;  // strictly increasing in time
  bool dt_warning = false;  // set when dt exceeds tau_min/1000

  double duration() const { return t.empty() ? 0.0 : t.back(); }
};

struct SpikeTrain {
  std::vector<double> times;  // strictly increasing, within the steady window
  std::vector<int> polarity;  // +1 / -1 per spike
  double rate = 0.0;          // count / steady-window length [Hz]
  double window_start = 0.0;
  double window_end = 0.0;
};

enum class Response { UnFiring, Oscillating, Firing, Ambiguous };
const char* response_name(Response r);

struct PeriodResult {
  enum class Kind { Oscillating, StuckInsulating, StuckMetallic } kind;
  double period = 0.0;  // valid iff kind == Oscillating
  bool oscillating() const { return kind == Kind::Oscillating; }
};

// Time-domain simulation. The node voltage is advanced with the exact
// exponential solution of the per-state RC equation
//   c_par dV/dt = (V_in(t) - V)/r_series - V/(r_dev + r_sample),
// so the only numerical error is switch-event location, which is found by
// bisection to dt/100 within the step. Jitter (when device.jitter_sigma > 0)
// redraws v_th and v_h once per full switching cycle and requires a seed.
Trace simulate(const NeuronCircuit& circuit, const DriveWaveform& drive, double dt,
               std::optional<uint64_t> rng_seed = std::nullopt);

// Constant-drive analysis of the ideal instantaneous-switching model.
// In each state the node relaxes toward v_in*Rp/(r_series+Rp) with
// tau = c_par*(r_series || Rp), Rp = r_dev + r_sample; the period is the sum
// of the two exponential segment times between the node voltages mapping to
// v_th and v_h through the device divider.
PeriodResult closed_form_period(const NeuronCircuit& circuit, double v_in);

// Constant-drive region boundaries at the circuit's r_series: below
// onset_voltage the device never reaches threshold (un-firing); at and above
// latch_voltage the metallic state never releases (firing). An oscillating
// band exists iff onset < latch.
double onset_voltage(const NeuronCircuit& circuit);
double latch_voltage(const NeuronCircuit& circuit);
std::optional<std::pair<double, double>> oscillation_band(const NeuronCircuit& circuit);

// 50% of the analytic metallic-interval spike amplitude.
double default_spike_threshold(const NeuronCircuit& circuit);

// One spike per upward crossing of |v_spike| through v_thresh; rate is
// counted over the steady window (after settle_frac of the duration).
SpikeTrain extract_spikes(const Trace& trace, double v_thresh, double settle_frac = 0.10);

// UnFiring = insulating for the whole steady window, Firing = metallic for
// the whole steady window, Oscillating = at least two full switch cycles in
// the window, anything else Ambiguous (trace too short).
Response classify_response(const Trace& trace, double settle_frac = 0.10);

}  // namespace vo2snn
