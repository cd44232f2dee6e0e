#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "vo2snn/transfer.hpp"

namespace vo2snn {

// Raw IDX container contents (big-endian magic + dims + bytes).
struct IdxImages {
  uint32_t count = 0, rows = 0, cols = 0;
  std::vector<uint8_t> bytes;  // count*rows*cols, row-major per image
};

IdxImages load_idx_images(const std::string& path);
std::vector<uint8_t> load_idx_labels(const std::string& path);

struct Dataset {
  Eigen::MatrixXd images;   // N x 784, pixel/255 in [0,1]
  std::vector<int> labels;  // N values in 0..9
  std::string split;        // "train" or "test"

  Eigen::Index size() const { return images.rows(); }
};

// Loads and pairs <dir>/{train,t10k}-{images-idx3,labels-idx1}-ubyte.
// Raises DimensionMismatch when images are not 28x28 or counts disagree.
Dataset load_dataset(const std::string& dir, const std::string& split);

// Directory resolution for the CLI and tests: explicit flag beats the
// VO2SNN_DATA_DIR environment variable, which beats ./data/mnist.
std::string resolve_data_dir(const std::string& flag_value);

struct EncodedInput {
  Eigen::VectorXd drive;  // volts per input neuron
  double window = 50e-6;  // observation window [s]
};

// Pixel intensities map linearly onto the transfer normalization:
// drive_i = v_on + pixel_i * (v_latch - v_on), constant over the window.
EncodedInput encode_rate(const Eigen::VectorXd& pixels, const RateTransfer& transfer,
                         double window = 50e-6);

}  // namespace vo2snn
