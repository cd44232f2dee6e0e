#pragma once

#include <vector>

#include "vo2snn/oscillator.hpp"

namespace vo2snn {

// Drive-voltage -> firing-rate curve of one neuron, used as the network
// activation. Knots are sampled on the rising branch of the vf curve between
// oscillation onset (rate 0) and the peak-frequency drive; evaluation clamps
// outside that interval. The normalized view maps [v_on, v_latch] -> [0,1]
// and [0, r_max] -> [0,1].
struct RateTransfer {
  std::vector<double> v_knots;  // strictly increasing [V]
  std::vector<double> r_knots;  // non-negative, non-decreasing [Hz]
  double v_on = 0.0;            // oscillation onset (rate 0 here)
  double v_latch = 0.0;         // end of the rising branch
  double r_max = 0.0;           // rate at v_latch

  double eval(double v) const;            // piecewise-linear, clamped [Hz]
  double eval_norm(double u) const;       // normalized in, normalized out
  double deriv_norm(double u) const;      // left derivative at knots, 0 outside (0,1]
  double drive_for(double u) const { return v_on + u * (v_latch - v_on); }
  double norm_of_drive(double v) const { return (v - v_on) / (v_latch - v_on); }
  // inverse of eval_norm on [0,1]: the normalized drive that fires at rate u
  double norm_drive_for_rate(double u) const;
};

// Samples the vf curve of the circuit across its oscillating band.
// Raises NoOscillatingBand when the circuit cannot oscillate at any drive.
RateTransfer build_transfer(const NeuronCircuit& circuit, int n_samples = 64);

}  // namespace vo2snn
