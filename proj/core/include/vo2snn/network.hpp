#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "vo2snn/mnist.hpp"
#include "vo2snn/transfer.hpp"

namespace vo2snn {

// Rate-coded feed-forward network. All signals are normalized rates in
// [0,1]; each layer computes transfer(W' * r_prev + b) elementwise. The
// hardware volts/hertz mapping only enters for time-domain simulation.
struct Network {
  std::vector<int> layer_sizes;          // default {784, 128, 10}
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: fan_in x fan_out
  std::vector<Eigen::VectorXd> biases;   // biases[l]: fan_out
  RateTransfer transfer;
};

// Hidden layers: Glorot-uniform weights, biases uniform in the middle third
// of the normalized drive domain. Output layer: zero weights with the bias
// at the MSE equilibrium of the default one-hot targets, so training grows
// the readout discriminatively instead of racing the no-gradient clamp.
Network make_network(const RateTransfer& transfer, std::vector<int> layer_sizes,
                     uint64_t seed);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  uint64_t rng_seed = 1;
  double target_hi = 1.0;
  // Non-class target rate. The transfer is steep near onset, so a rate
  // target this size keeps the resting pre-activation safely inside the
  // live region instead of a hair above the zero-derivative clamp.
  double target_lo = 0.40;
};

// Layer-0 rates for raw pixel images: rate = transfer(pixel) in the
// normalized view (pixels map linearly onto the drive domain).
Eigen::MatrixXd input_rates(const Network& net, const Eigen::MatrixXd& images);

// All layer activations for a batch of input rates (rows = samples).
// activations[0] is the input itself.
std::vector<Eigen::MatrixXd> forward_all(const Network& net, const Eigen::MatrixXd& rates);
Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& rates);

struct EpochStats {
  double train_loss = 0.0;
  double test_accuracy = -1.0;  // negative when no eval set was given
};

// Mini-batch gradient descent with momentum on the MSE between output rates
// and one-hot rate targets; gradients use the transfer's piecewise-linear
// left derivative. Raises DivergedLoss on non-finite loss.
std::vector<EpochStats> train(Network& net, const Dataset& train_set, const TrainConfig& cfg,
                              const Dataset* eval_set = nullptr);

struct EvalResult {
  double accuracy = 0.0;
  Eigen::Matrix<std::int64_t, 10, 10> confusion;  // rows true, cols predicted
};

EvalResult evaluate(const Network& net, const Dataset& test_set);

// Versioned JSON serialization (layer sizes, row-major weights, biases,
// transfer knots). See docs/formats.md.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace vo2snn
