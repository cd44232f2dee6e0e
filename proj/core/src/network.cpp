#include "vo2snn/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "vo2snn/errors.hpp"

namespace vo2snn {

namespace {

// Mean one-hot rate target under the default TrainConfig; the output layer
// starts at the pre-activation whose rate equals it, which is the MSE
// equilibrium of an undiscriminating net. Starting there (with zero output
// weights) avoids the early wholesale drift that otherwise strands output
// units in the transfer's zero-derivative region below onset.
constexpr double kMeanTargetRate = (1.0 + 9.0 * 0.40) / 10.0;

double act(const RateTransfer& tr, double z) { return tr.eval_norm(std::clamp(z, 0.0, 1.0)); }

Eigen::MatrixXd act_mat(const RateTransfer& tr, const Eigen::MatrixXd& z) {
  return z.unaryExpr([&tr](double v) { return act(tr, v); });
}

Eigen::MatrixXd deriv_mat(const RateTransfer& tr, const Eigen::MatrixXd& z) {
  return z.unaryExpr([&tr](double v) { return tr.deriv_norm(v); });
}

}  // namespace

Network make_network(const RateTransfer& transfer, std::vector<int> layer_sizes,
                     uint64_t seed) {
  if (layer_sizes.size() < 2) raise(Errc::bad_config, "network needs at least two layers");
  Network net;
  net.transfer = transfer;
  net.layer_sizes = std::move(layer_sizes);
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    int fi = net.layer_sizes[l], fo = net.layer_sizes[l + 1];
    bool output_layer = l + 2 == net.layer_sizes.size();
    double a = output_layer ? 0.0 : std::sqrt(6.0 / (fi + fo));
    std::uniform_real_distribution<double> wdist(-a, a);
    std::uniform_real_distribution<double> bdist(1.0 / 3.0, 2.0 / 3.0);
    Eigen::MatrixXd w(fi, fo);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = output_layer ? 0.0 : wdist(rng);
    Eigen::VectorXd b(fo);
    double b_eq = transfer.norm_drive_for_rate(kMeanTargetRate);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = output_layer ? b_eq : bdist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

Eigen::MatrixXd input_rates(const Network& net, const Eigen::MatrixXd& images) {
  return act_mat(net.transfer, images);
}

std::vector<Eigen::MatrixXd> forward_all(const Network& net, const Eigen::MatrixXd& rates) {
  if (rates.cols() != net.layer_sizes.front())
    raise(Errc::shape_mismatch, "input has " + std::to_string(rates.cols()) +
                                    " columns, layer 0 expects " +
                                    std::to_string(net.layer_sizes.front()));
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(net.weights.size() + 1);
  acts.push_back(rates);
  for (size_t l = 0; l < net.weights.size(); ++l) {
    Eigen::MatrixXd z = (acts.back() * net.weights[l]).rowwise() + net.biases[l].transpose();
    acts.push_back(act_mat(net.transfer, z));
  }
  return acts;
}

Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& rates) {
  return forward_all(net, rates).back();
}

namespace {

Eigen::MatrixXd one_hot_targets(const std::vector<int>& labels, double hi, double lo) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(Eigen::Index(labels.size()), 10, lo);
  for (size_t i = 0; i < labels.size(); ++i) t(Eigen::Index(i), labels[i]) = hi;
  return t;
}

int argmax_row(const Eigen::MatrixXd& m, Eigen::Index r) {
  int best = 0;
  for (Eigen::Index c = 1; c < m.cols(); ++c)
    if (m(r, c) > m(r, best)) best = int(c);
  return best;
}

}  // namespace

std::vector<EpochStats> train(Network& net, const Dataset& train_set, const TrainConfig& cfg,
                              const Dataset* eval_set) {
  if (train_set.size() == 0) raise(Errc::empty_run, "training set is empty");
  if (cfg.epochs < 1 || cfg.learning_rate < 0 || cfg.momentum < 0 || cfg.momentum >= 1 ||
      cfg.batch_size < 1 || !(cfg.target_lo < cfg.target_hi) || cfg.target_hi > 1.0)
    raise(Errc::bad_config, "invalid train config");

  const Eigen::MatrixXd X = input_rates(net, train_set.images);
  const Eigen::MatrixXd T = one_hot_targets(train_set.labels, cfg.target_hi, cfg.target_lo);
  const Eigen::Index n = X.rows();
  const int n_out = net.layer_sizes.back();

  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::VectorXd> vel_b;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    vel_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    vel_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochStats> history;
  for (int ep = 0; ep < cfg.epochs; ++ep) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index i0 = 0; i0 < n; i0 += cfg.batch_size) {
      Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - i0);
      Eigen::MatrixXd xb(bs, X.cols()), tb(bs, 10);
      for (Eigen::Index r = 0; r < bs; ++r) {
        xb.row(r) = X.row(order[size_t(i0 + r)]);
        tb.row(r) = T.row(order[size_t(i0 + r)]);
      }
      // forward, keeping pre-activations for the backward pass
      std::vector<Eigen::MatrixXd> acts{xb}, zs;
      for (size_t l = 0; l < net.weights.size(); ++l) {
        zs.push_back((acts.back() * net.weights[l]).rowwise() + net.biases[l].transpose());
        acts.push_back(act_mat(net.transfer, zs.back()));
      }
      Eigen::MatrixXd err = acts.back() - tb;
      loss_sum += err.squaredNorm() / n_out;
      Eigen::MatrixXd delta =
          (2.0 / n_out) * err.cwiseProduct(deriv_mat(net.transfer, zs.back()));
      for (size_t l = net.weights.size(); l-- > 0;) {
        Eigen::MatrixXd grad_w = acts[l].transpose() * delta / double(bs);
        Eigen::VectorXd grad_b = delta.colwise().mean();
        if (l > 0)
          delta = (delta * net.weights[l].transpose())
                      .cwiseProduct(deriv_mat(net.transfer, zs[l - 1]));
        vel_w[l] = cfg.momentum * vel_w[l] - cfg.learning_rate * grad_w;
        vel_b[l] = cfg.momentum * vel_b[l] - cfg.learning_rate * grad_b;
        net.weights[l] += vel_w[l];
        net.biases[l] += vel_b[l];
      }
    }
    EpochStats st;
    st.train_loss = loss_sum / double(n);
    if (!std::isfinite(st.train_loss))
      raise(Errc::diverged_loss, "training loss became non-finite (epoch " +
                                     std::to_string(ep + 1) + "); lower the learning rate");
    if (eval_set) st.test_accuracy = evaluate(net, *eval_set).accuracy;
    history.push_back(st);
  }
  return history;
}

EvalResult evaluate(const Network& net, const Dataset& test_set) {
  if (test_set.size() == 0) raise(Errc::empty_run, "test set is empty");
  EvalResult res;
  res.confusion.setZero();
  Eigen::MatrixXd out = forward(net, input_rates(net, test_set.images));
  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    int pred = argmax_row(out, r);
    int truth = test_set.labels[size_t(r)];
    res.confusion(truth, pred)++;
    if (pred == truth) ++correct;
  }
  res.accuracy = double(correct) / double(out.rows());
  return res;
}

void save_network(const Network& net, const std::string& path) {
  nlohmann::json j;
  j["format"] = "vo2snn-network";
  j["version"] = 1;
  j["layer_sizes"] = net.layer_sizes;
  j["transfer"] = {{"v_knots", net.transfer.v_knots}, {"r_knots", net.transfer.r_knots},
                   {"v_on", net.transfer.v_on},       {"v_latch", net.transfer.v_latch},
                   {"r_max", net.transfer.r_max}};
  for (size_t l = 0; l < net.weights.size(); ++l) {
    std::vector<double> w(size_t(net.weights[l].size()));
    // row-major: all outgoing weights of one input unit are contiguous
    for (Eigen::Index i = 0; i < net.weights[l].rows(); ++i)
      for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c)
        w[size_t(i) * size_t(net.weights[l].cols()) + size_t(c)] = net.weights[l](i, c);
    j["weights"].push_back(w);
    j["biases"].push_back(
        std::vector<double>(net.biases[l].data(), net.biases[l].data() + net.biases[l].size()));
  }
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write " + path);
  out << j.dump(1, '\t') << "\n";
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::bad_config, path + ": " + e.what());
  }
  if (j.value("format", "") != "vo2snn-network" || j.value("version", 0) != 1)
    raise(Errc::bad_config, path + ": not a version-1 vo2snn network file");
  Network net;
  net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const auto& t = j.at("transfer");
  net.transfer.v_knots = t.at("v_knots").get<std::vector<double>>();
  net.transfer.r_knots = t.at("r_knots").get<std::vector<double>>();
  net.transfer.v_on = t.at("v_on").get<double>();
  net.transfer.v_latch = t.at("v_latch").get<double>();
  net.transfer.r_max = t.at("r_max").get<double>();
  for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    Eigen::Index fi = net.layer_sizes[l], fo = net.layer_sizes[l + 1];
    auto w = j.at("weights").at(l).get<std::vector<double>>();
    auto b = j.at("biases").at(l).get<std::vector<double>>();
    if (Eigen::Index(w.size()) != fi * fo || Eigen::Index(b.size()) != fo)
      raise(Errc::shape_mismatch, path + ": weight block does not match layer sizes");
    Eigen::MatrixXd wm(fi, fo);
    for (Eigen::Index i = 0; i < fi; ++i)
      for (Eigen::Index c = 0; c < fo; ++c) wm(i, c) = w[size_t(i) * size_t(fo) + size_t(c)];
    net.weights.push_back(std::move(wm));
    net.biases.push_back(Eigen::Map<Eigen::VectorXd>(b.data(), fo));
  }
  return net;
}

}  // namespace vo2snn
