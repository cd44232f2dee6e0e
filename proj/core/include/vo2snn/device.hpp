#pragma once

#include <string>

namespace vo2snn {

// Two-state hysteretic threshold switch. The device is either insulating or
// metallic; it switches up when the voltage across it reaches v_th and drops
// back once that voltage falls to v_h. Thresholds act on |v|, so negative
// drive produces inverse spikes.
enum class Phase { Insulating, Metallic };

struct DeviceParams {
  int level = 1;              // oxygen vacancy level, 1..5
  double v_th = 0.0;          // insulator->metal threshold [V]
  double v_h = 0.0;           // metal->insulator hold voltage [V]
  double r_ins = 0.0;         // insulating-state resistance [ohm]
  double r_met = 0.0;         // metallic-state resistance [ohm]
  double jitter_sigma = 0.0;  // per-cycle Gaussian jitter on v_th and v_h [V]

  DeviceParams without_jitter() const {
    DeviceParams p = *this;
    p.jitter_sigma = 0.0;
    return p;
  }
};

struct DeviceState {
  Phase phase = Phase::Insulating;
};

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;

// Default parameter table for vacancy levels 1..5. v_th runs linearly from
// 6.5 V down to 1.75 V; hysteresis width and insulating resistance shrink
// with level; level 5 is nearly metallic (r_ins close to r_met) and has no
// oscillating band under the stock matching circuit.
DeviceParams device_params(int level);

// Load a parameter table from a plain-text config file. Schema: one
// `device.<level>.<field> = <value>` entry per line, `#` comments; fields are
// v_th, v_h, r_ins, r_met, jitter_sigma. Missing levels fall back to the
// built-in table. See docs/formats.md.
DeviceParams device_params_from_config(const std::string& path, int level);

double resistance(DeviceState state, const DeviceParams& params);

// Hysteretic state update for the instantaneous device voltage. Values
// strictly inside (v_h, v_th) leave the state unchanged. Symmetric in |v|.
DeviceState step_state(DeviceState state, double v_device, const DeviceParams& params);

}  // namespace vo2snn
