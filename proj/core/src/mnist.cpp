#include "vo2snn/mnist.hpp"

#include <cstdlib>
#include <fstream>

#include "vo2snn/errors.hpp"

namespace vo2snn {

namespace {

uint32_t read_be32(std::ifstream& in, const std::string& path) {
  uint8_t b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    raise(Errc::truncated_file, path + ": unexpected end of file in header");
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace

IdxImages load_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  uint32_t magic = read_be32(in, path);
  if (magic != 0x00000803)
    raise(Errc::bad_magic, path + ": expected image magic 0x803");
  IdxImages img;
  img.count = read_be32(in, path);
  img.rows = read_be32(in, path);
  img.cols = read_be32(in, path);
  size_t total = size_t(img.count) * img.rows * img.cols;
  img.bytes.resize(total);
  if (!in.read(reinterpret_cast<char*>(img.bytes.data()), std::streamsize(total)))
    raise(Errc::truncated_file, path + ": file shorter than header claims");
  return img;
}

std::vector<uint8_t> load_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  uint32_t magic = read_be32(in, path);
  if (magic != 0x00000801)
    raise(Errc::bad_magic, path + ": expected label magic 0x801");
  uint32_t count = read_be32(in, path);
  std::vector<uint8_t> labels(count);
  if (count == 0) raise(Errc::truncated_file, path + ": empty label file");
  if (!in.read(reinterpret_cast<char*>(labels.data()), std::streamsize(count)))
    raise(Errc::truncated_file, path + ": file shorter than header claims");
  for (uint8_t l : labels)
    if (l > 9) raise(Errc::label_out_of_range, path + ": label " + std::to_string(int(l)));
  return labels;
}

Dataset load_dataset(const std::string& dir, const std::string& split) {
  std::string stem = split == "train" ? "train" : "t10k";
  IdxImages img = load_idx_images(dir + "/" + stem + "-images-idx3-ubyte");
  std::vector<uint8_t> lab = load_idx_labels(dir + "/" + stem + "-labels-idx1-ubyte");
  if (img.rows != 28 || img.cols != 28)
    raise(Errc::dimension_mismatch, "expected 28x28 images, got " + std::to_string(img.rows) +
                                        "x" + std::to_string(img.cols));
  if (img.count != lab.size())
    raise(Errc::dimension_mismatch,
          "image/label count mismatch: " + std::to_string(img.count) + " vs " +
              std::to_string(lab.size()));
  Dataset ds;
  ds.split = split;
  ds.images.resize(Eigen::Index(img.count), 784);
  for (Eigen::Index n = 0; n < ds.images.rows(); ++n)
    for (Eigen::Index p = 0; p < 784; ++p)
      ds.images(n, p) = img.bytes[size_t(n) * 784 + size_t(p)] / 255.0;
  ds.labels.assign(lab.begin(), lab.end());
  return ds;
}

std::string resolve_data_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("VO2SNN_DATA_DIR"); env && *env) return env;
  return "data/mnist";
}

EncodedInput encode_rate(const Eigen::VectorXd& pixels, const RateTransfer& transfer,
                         double window) {
  if (window <= 0) raise(Errc::bad_config, "encode window must be positive");
  EncodedInput enc;
  enc.window = window;
  enc.drive.resize(pixels.size());
  for (Eigen::Index i = 0; i < pixels.size(); ++i)
    enc.drive[i] = transfer.drive_for(pixels[i]);
  return enc;
}

}  // namespace vo2snn
