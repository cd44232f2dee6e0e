#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vo2snn/device.hpp"
#include "vo2snn/oscillator.hpp"

namespace vo2snn {

enum class Branch { Up, Down };

struct IVPoint {
  double v_applied;  // source voltage [V]
  double i;          // current through the load + device [A]
  Branch branch;
};

// Quasi-static sweep through a current-limiting series load. Thresholds are
// reported both source-referred (sweep voltage at the jump) and
// device-referred (voltage across the device just before the jump). The
// load must be small enough that the metallic state holds right after the
// up-switch (level 4 needs < ~620 ohm), or the sweep has no stable
// down-branch.
struct IVCurve {
  std::vector<IVPoint> points;
  bool has_extraction = false;  // false when the sweep never switched
  double extracted_v_th = 0.0;
  double extracted_v_h = 0.0;
  double extracted_v_th_source = 0.0;
  double extracted_v_h_source = 0.0;
};

IVCurve iv_sweep(const DeviceParams& device, double v_max, int steps,
                 double load_resistor = 500.0);

// Source sweep ceiling that comfortably clears the device threshold behind
// the load divider.
double default_sweep_vmax(const DeviceParams& device, double load_resistor = 500.0);

struct ThresholdStats {
  std::vector<double> v_th_sorted;  // per-cycle thresholds, ascending
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

// Per-cycle effective thresholds across n_cycles switching cycles; with
// jitter_sigma = 0 every cycle reproduces v_th exactly.
ThresholdStats threshold_stats(const DeviceParams& device, int n_cycles, uint64_t rng_seed);

struct PhaseDiagram {
  std::vector<double> r_axis;  // log-spaced series resistances [ohm]
  std::vector<double> v_axis;  // linear drive voltages [V]
  std::vector<Response> labels;  // row-major: labels[ir * v_axis.size() + iv]
  std::optional<std::pair<double, double>> triple_point;  // (r, v), refined
  int region_count = 0;  // connected components of the label grid
  bool sim_crosscheck_ok = false;

  Response label_at(size_t ir, size_t iv) const { return labels[ir * v_axis.size() + iv]; }
};

// Classifies every (r_series, v_in) cell through closed_form_period, counts
// connected regions, and refines the triple point by bisection on the
// onset/latch boundary curves. Three randomly chosen cells are re-simulated
// in the time domain as a cross-check.
PhaseDiagram phase_diagram(const DeviceParams& device, std::pair<double, double> r_range,
                           std::pair<double, double> v_range, int nr, int nv,
                           double c_par = 1.8e-9, double r_sample = 50.0,
                           uint64_t crosscheck_seed = 1);

struct CurveSeries {
  std::vector<double> x;     // volts (vf) or hertz (power)
  std::vector<double> y;     // hertz (vf) or watts (power)
  std::vector<bool> valid;   // false where the point does not oscillate
  int level = 0;
  double crosscheck_rel_err = 0.0;  // worst deviation of the sim spot checks
};

// Frequency versus drive voltage from the closed form, spot-checked against
// time-domain simulation at three of the points.
CurveSeries vf_curve(const NeuronCircuit& circuit, const std::vector<double>& v_points,
                     uint64_t crosscheck_seed = 1);

// Average total source power over one period versus oscillation frequency,
// from closed-form segment integrals; non-oscillating points are flagged and
// carry the DC equilibrium power instead.
CurveSeries power_curve(const NeuronCircuit& circuit, const std::vector<double>& v_points,
                        uint64_t crosscheck_seed = 1);

// Drive voltage of maximum oscillation frequency (the vf curves rise from
// onset to this point, then slow down again just before the latch boundary).
double peak_frequency_voltage(const NeuronCircuit& circuit);

// n drive points spanning the rising branch [onset + 2% of the rise, peak].
std::vector<double> default_drive_points(const NeuronCircuit& circuit, int n);

}  // namespace vo2snn
