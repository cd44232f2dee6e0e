#include "vo2snn/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vo2snn/errors.hpp"

namespace vo2snn {

namespace {

// Bank of identical oscillator circuits advanced on a shared clock with a
// drive that is frozen across each step.
class OscillatorBank {
 public:
  OscillatorBank(const NeuronCircuit& circuit, size_t n, double tau_syn, double dt,
                 std::optional<uint64_t> seed)
      : c_(circuit),
        n_(n),
        dt_(dt),
        syn_decay_(std::exp(-dt / tau_syn)),
        syn_gain_(1.0 / tau_syn),
        rng_(seed.value_or(0)),
        jitter_(circuit.device.jitter_sigma) {
    if ((jitter_ > 0) != seed.has_value())
      raise(Errc::bad_config, "rng seed must be given exactly when jitter_sigma > 0");
    v_.assign(n, 0.0);
    metallic_.assign(n, 0);
    filt_.assign(n, 0.0);
    spikes_.resize(n);
    vth_.assign(n, c_.device.v_th);
    vh_.assign(n, c_.device.v_h);
    if (jitter_ > 0)
      for (size_t i = 0; i < n; ++i) redraw(i);
    for (Phase ph : {Phase::Insulating, Phase::Metallic}) {
      double rp = (ph == Phase::Insulating ? c_.device.r_ins : c_.device.r_met) + c_.r_sample;
      int s = ph == Phase::Metallic;
      kappa_[s] = rp / (c_.r_series + rp);
      tau_[s] = c_.c_par * (c_.r_series * rp) / (c_.r_series + rp);
    }
  }

  // advance neuron i by dt under constant drive; records spikes at I->M
  void step_neuron(size_t i, double drive, double t0) {
    double remaining = dt_;
    double t_cur = t0;
    for (int guard = 0; guard < 64 && remaining > 0; ++guard) {
      int s = metallic_[i];
      double veq = drive * kappa_[s];
      double v0 = v_[i];
      auto at = [&](double h) { return veq + (v0 - veq) * std::exp(-h / tau_[s]); };
      double bound = s ? vh_[i] * (c_.device.r_met + c_.r_sample) / c_.device.r_met
                       : vth_[i] * (c_.device.r_ins + c_.r_sample) / c_.device.r_ins;
      auto crossed = [&](double v) { return s ? std::abs(v) <= bound : std::abs(v) >= bound; };
      double v_end = at(remaining);
      if (!std::isfinite(v_end))
        raise(Errc::non_finite_state, "network simulation produced a non-finite voltage");
      if (!crossed(v_end)) {
        v_[i] = v_end;
        break;
      }
      double lo = 0.0, hi = remaining;
      while (hi - lo > dt_ / 100.0) {
        double mid = 0.5 * (lo + hi);
        (crossed(at(mid)) ? hi : lo) = mid;
      }
      v_[i] = at(hi);
      t_cur += hi;
      remaining -= hi;
      if (!metallic_[i]) {
        spikes_[i].push_back(t_cur);
        filt_[i] += syn_gain_;
      } else if (jitter_ > 0) {
        redraw(i);  // cycle completed
      }
      metallic_[i] = !metallic_[i];
    }
  }

  void decay_filters() {
    for (double& f : filt_) f *= syn_decay_;
  }

  double filtered_rate(size_t i) const { return filt_[i]; }
  const std::vector<double>& spikes(size_t i) const { return spikes_[i]; }

  // inter-spike-interval rate over the steady window, falling back to a
  // count-based rate when there are too few spikes
  double steady_rate(size_t i, double window, double settle_frac = 0.10) const {
    double t0 = settle_frac * window;
    const auto& sp = spikes_[i];
    std::vector<double> w;
    for (double t : sp)
      if (t >= t0) w.push_back(t);
    if (w.size() >= 3) return double(w.size() - 1) / (w.back() - w.front());
    return double(w.size()) / (window - t0);
  }

 private:
  void redraw(size_t i) {
    std::normal_distribution<double> g(0.0, jitter_);
    vth_[i] = c_.device.v_th + g(rng_);
    vh_[i] = c_.device.v_h + g(rng_);
    if (vh_[i] >= vth_[i]) vh_[i] = vth_[i] - 1e-9;
  }

  NeuronCircuit c_;
  size_t n_;
  double dt_, syn_decay_, syn_gain_;
  std::mt19937_64 rng_;
  double jitter_;
  double kappa_[2], tau_[2];
  std::vector<double> v_, filt_, vth_, vh_;
  std::vector<char> metallic_;
  std::vector<std::vector<double>> spikes_;
};

}  // namespace

TimeDomainResult simulate_network_timedomain(const Network& net, const NeuronCircuit& circuit,
                                             const EncodedInput& input, double dt,
                                             double tau_syn,
                                             std::optional<uint64_t> rng_seed) {
  if (input.drive.size() != net.layer_sizes.front())
    raise(Errc::shape_mismatch, "encoded input does not match the input layer size");
  if (input.window < 10.0 / net.transfer.r_max)
    raise(Errc::window_too_short, "window must cover at least 10 peak-rate periods");

  const size_t n_layers = net.layer_sizes.size();
  std::vector<size_t> offset(n_layers, 0);
  size_t n_total = 0;
  for (size_t l = 0; l < n_layers; ++l) {
    offset[l] = n_total;
    n_total += size_t(net.layer_sizes[l]);
  }
  OscillatorBank bank(circuit, n_total, tau_syn, dt, rng_seed);
  const RateTransfer& tr = net.transfer;

  const size_t n_steps = size_t(std::llround(input.window / dt));
  std::vector<Eigen::VectorXd> rates(n_layers);
  for (size_t l = 0; l < n_layers; ++l) rates[l].setZero(net.layer_sizes[l]);

  for (size_t step = 0; step < n_steps; ++step) {
    double t = double(step) * dt;
    bank.decay_filters();
    for (size_t l = 0; l < n_layers; ++l)
      for (Eigen::Index i = 0; i < net.layer_sizes[l]; ++i)
        rates[l][i] = bank.filtered_rate(offset[l] + size_t(i)) / tr.r_max;
    for (size_t l = 0; l < n_layers; ++l) {
      if (l == 0) {
        for (Eigen::Index i = 0; i < net.layer_sizes[0]; ++i)
          bank.step_neuron(size_t(i), input.drive[i], t);
        continue;
      }
      Eigen::VectorXd z =
          net.weights[l - 1].transpose() * rates[l - 1] + net.biases[l - 1];
      for (Eigen::Index i = 0; i < net.layer_sizes[l]; ++i)
        bank.step_neuron(offset[l] + size_t(i), tr.drive_for(std::clamp(z[i], 0.0, 1.0)), t);
    }
  }

  TimeDomainResult res;
  res.layers.resize(n_layers);
  for (size_t l = 0; l < n_layers; ++l) {
    res.layers[l].window = input.window;
    res.layers[l].spike_times.resize(size_t(net.layer_sizes[l]));
    for (Eigen::Index i = 0; i < net.layer_sizes[l]; ++i)
      res.layers[l].spike_times[size_t(i)] = bank.spikes(offset[l] + size_t(i));
  }
  size_t out0 = offset[n_layers - 1];
  res.output_rates.resize(size_t(net.layer_sizes.back()));
  for (size_t i = 0; i < res.output_rates.size(); ++i)
    res.output_rates[i] = bank.steady_rate(out0 + i, input.window);
  res.predicted_label = int(std::max_element(res.output_rates.begin(), res.output_rates.end()) -
                            res.output_rates.begin());
  return res;
}

Net2x2Result simulate_2x2(const NeuronCircuit& circuit, const RateTransfer& transfer,
                          const Eigen::Matrix2d& weights, const Eigen::Vector2d& input_rates,
                          double window, double dt, double tau_syn) {
  if (window < 10.0 / transfer.r_max)
    raise(Errc::window_too_short, "window must cover at least 10 peak-rate periods");
  OscillatorBank bank(circuit, 4, tau_syn, dt, std::nullopt);

  // invert the transfer so each input oscillator actually fires at the
  // requested normalized rate
  double in_drive[2] = {transfer.drive_for(transfer.norm_drive_for_rate(input_rates[0])),
                        transfer.drive_for(transfer.norm_drive_for_rate(input_rates[1]))};

  const size_t n_steps = size_t(std::llround(window / dt));
  for (size_t step = 0; step < n_steps; ++step) {
    double t = double(step) * dt;
    bank.decay_filters();
    Eigen::Vector2d r_in(bank.filtered_rate(0) / transfer.r_max,
                         bank.filtered_rate(1) / transfer.r_max);
    Eigen::Vector2d z = weights * r_in;
    bank.step_neuron(0, in_drive[0], t);
    bank.step_neuron(1, in_drive[1], t);
    bank.step_neuron(2, transfer.drive_for(std::clamp(z[0], 0.0, 1.0)), t);
    bank.step_neuron(3, transfer.drive_for(std::clamp(z[1], 0.0, 1.0)), t);
  }

  Net2x2Result res;
  res.raster.window = window;
  res.raster.spike_times.resize(4);
  for (size_t i = 0; i < 4; ++i) {
    res.raster.spike_times[i] = bank.spikes(i);
    res.rates[i] = bank.steady_rate(i, window);
  }
  return res;
}

}  // namespace vo2snn
