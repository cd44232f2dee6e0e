#include "vo2snn/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "vo2snn/characterization.hpp"
#include "vo2snn/errors.hpp"

namespace vo2snn {

double RateTransfer::eval(double v) const {
  if (v <= v_knots.front()) return r_knots.front();
  if (v >= v_knots.back()) return r_knots.back();
  auto it = std::upper_bound(v_knots.begin(), v_knots.end(), v);
  size_t k = static_cast<size_t>(it - v_knots.begin());
  double t = (v - v_knots[k - 1]) / (v_knots[k] - v_knots[k - 1]);
  return r_knots[k - 1] + t * (r_knots[k] - r_knots[k - 1]);
}

double RateTransfer::eval_norm(double u) const { return eval(drive_for(u)) / r_max; }

double RateTransfer::norm_drive_for_rate(double u) const {
  double target = std::clamp(u, 0.0, 1.0) * r_max;
  if (target <= r_knots.front()) return norm_of_drive(v_knots.front());
  for (size_t k = 1; k < r_knots.size(); ++k) {
    if (target <= r_knots[k]) {
      double t = (target - r_knots[k - 1]) / (r_knots[k] - r_knots[k - 1]);
      return norm_of_drive(v_knots[k - 1] + t * (v_knots[k] - v_knots[k - 1]));
    }
  }
  return norm_of_drive(v_knots.back());
}

double RateTransfer::deriv_norm(double u) const {
  if (u <= 0.0 || u > 1.0) return 0.0;
  double v = drive_for(u);
  auto it = std::lower_bound(v_knots.begin(), v_knots.end(), v);
  size_t k = static_cast<size_t>(it - v_knots.begin());
  if (k == 0) k = 1;  // u in the first segment
  double slope_hz = (r_knots[k] - r_knots[k - 1]) / (v_knots[k] - v_knots[k - 1]);
  return slope_hz * (v_latch - v_on) / r_max;
}

RateTransfer build_transfer(const NeuronCircuit& circuit, int n_samples) {
  if (n_samples < 16) raise(Errc::bad_config, "build_transfer needs n_samples >= 16");
  auto band = oscillation_band(circuit);
  if (!band)
    raise(Errc::no_oscillating_band, "device level " + std::to_string(circuit.device.level) +
                                         " never oscillates in this circuit");
  RateTransfer tr;
  tr.v_on = band->first;
  tr.v_latch = peak_frequency_voltage(circuit);
  tr.v_knots.resize(static_cast<size_t>(n_samples));
  tr.r_knots.resize(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    double v = tr.v_on + (tr.v_latch - tr.v_on) * double(i) / (n_samples - 1);
    PeriodResult pr = closed_form_period(circuit, v);
    tr.v_knots[static_cast<size_t>(i)] = v;
    tr.r_knots[static_cast<size_t>(i)] = pr.oscillating() ? 1.0 / pr.period : 0.0;
  }
  tr.r_knots.front() = 0.0;  // rate is exactly zero at onset
  tr.r_max = tr.r_knots.back();
  // the rising branch is monotone; guard against roundoff at the peak
  for (size_t i = 1; i < tr.r_knots.size(); ++i)
    tr.r_knots[i] = std::max(tr.r_knots[i], tr.r_knots[i - 1]);
  return tr;
}

}  // namespace vo2snn
