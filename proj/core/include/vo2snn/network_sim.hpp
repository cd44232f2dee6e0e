#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vo2snn/network.hpp"
#include "vo2snn/oscillator.hpp"

namespace vo2snn {

struct RasterPlot {
  std::vector<std::vector<double>> spike_times;  // per neuron, strictly increasing
  double window = 0.0;
};

struct TimeDomainResult {
  std::vector<RasterPlot> layers;    // one raster per layer, input first
  std::vector<double> output_rates;  // Hz per output neuron
  int predicted_label = 0;
};

// Runs every neuron as a full relaxation-oscillator circuit on a shared
// clock. Presynaptic spike trains pass through an exponential low-pass
// (tau_syn) to an instantaneous rate estimate; each downstream neuron's
// drive is bias + weighted sum of those normalized rates, mapped through the
// transfer normalization and clamped to the drive domain. Output rates are
// estimated from inter-spike intervals in the steady window.
TimeDomainResult simulate_network_timedomain(const Network& net, const NeuronCircuit& circuit,
                                             const EncodedInput& input, double dt = 20e-9,
                                             double tau_syn = 2e-6,
                                             std::optional<uint64_t> rng_seed = std::nullopt);

struct Net2x2Result {
  RasterPlot raster;  // rows: input 1, input 2, output 1, output 2
  std::array<double, 4> rates{};  // Hz, same order
};

// Fig-3H style 2x2 network: two input oscillators at equal drive feed two
// output oscillators through a signed weight matrix (weights(i, j) couples
// input j to output i). input_rates are normalized target rates for the
// input pair.
Net2x2Result simulate_2x2(const NeuronCircuit& circuit, const RateTransfer& transfer,
                          const Eigen::Matrix2d& weights, const Eigen::Vector2d& input_rates,
                          double window, double dt = 20e-9, double tau_syn = 2e-6);

}  // namespace vo2snn
