#include "vo2snn/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "vo2snn/errors.hpp"

namespace vo2snn {

namespace {

double unfiring_boundary(const DeviceParams& d, double r_series, double r_sample) {
  return d.v_th * (r_series + d.r_ins + r_sample) / d.r_ins;
}

double latch_boundary(const DeviceParams& d, double r_series, double r_sample) {
  return d.v_h * (r_series + d.r_met + r_sample) / d.r_met;
}

Response classify_closed_form(const NeuronCircuit& c, double v) {
  PeriodResult pr = closed_form_period(c, v);
  switch (pr.kind) {
    case PeriodResult::Kind::StuckInsulating: return Response::UnFiring;
    case PeriodResult::Kind::Oscillating: return Response::Oscillating;
    case PeriodResult::Kind::StuckMetallic: return Response::Firing;
  }
  return Response::Ambiguous;
}

}  // namespace

double default_sweep_vmax(const DeviceParams& device, double load_resistor) {
  return 1.5 * device.v_th * (load_resistor + device.r_ins) / device.r_ins;
}

IVCurve iv_sweep(const DeviceParams& device, double v_max, int steps, double load_resistor) {
  if (steps < 100) raise(Errc::bad_config, "iv_sweep needs steps >= 100");
  if (v_max <= 0 || load_resistor <= 0)
    raise(Errc::bad_config, "iv_sweep needs positive v_max and load resistor");
  IVCurve curve;
  curve.points.reserve(2 * static_cast<size_t>(steps) + 1);
  DeviceState st{Phase::Insulating};
  bool saw_up = false, saw_down = false;
  auto push = [&](double v_src, Branch br) {
    double r_dev = resistance(st, device);
    double v_dev = v_src * r_dev / (load_resistor + r_dev);
    DeviceState next = step_state(st, v_dev, device);
    if (next.phase != st.phase) {
      if (next.phase == Phase::Metallic && !saw_up) {
        saw_up = true;
        curve.extracted_v_th_source = v_src;
        curve.extracted_v_th = v_dev;  // divider voltage at the jump
      } else if (next.phase == Phase::Insulating && saw_up && !saw_down) {
        saw_down = true;
        curve.extracted_v_h_source = v_src;
        curve.extracted_v_h = v_src * device.r_met / (load_resistor + device.r_met);
      }
      st = next;
      r_dev = resistance(st, device);
    }
    curve.points.push_back({v_src, v_src / (load_resistor + r_dev), br});
  };
  for (int k = 0; k <= steps; ++k) push(v_max * k / steps, Branch::Up);
  for (int k = steps - 1; k >= 0; --k) push(v_max * k / steps, Branch::Down);
  curve.has_extraction = saw_up && saw_down;
  return curve;
}

ThresholdStats threshold_stats(const DeviceParams& device, int n_cycles, uint64_t rng_seed) {
  if (n_cycles <= 0) raise(Errc::empty_run, "threshold_stats needs n_cycles >= 1");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ThresholdStats st;
  st.v_th_sorted.resize(static_cast<size_t>(n_cycles));
  for (auto& v : st.v_th_sorted)
    v = device.v_th + (device.jitter_sigma > 0 ? device.jitter_sigma * gauss(rng) : 0.0);
  std::sort(st.v_th_sorted.begin(), st.v_th_sorted.end());
  st.mean = std::accumulate(st.v_th_sorted.begin(), st.v_th_sorted.end(), 0.0) / n_cycles;
  if (n_cycles > 1) {
    double ss = 0.0;
    for (double v : st.v_th_sorted) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / (n_cycles - 1));
  }
  return st;
}

PhaseDiagram phase_diagram(const DeviceParams& device, std::pair<double, double> r_range,
                           std::pair<double, double> v_range, int nr, int nv, double c_par,
                           double r_sample, uint64_t crosscheck_seed) {
  if (nr < 8 || nv < 8) raise(Errc::bad_config, "phase_diagram needs a grid of at least 8x8");
  if (r_range.first <= 0 || r_range.second <= r_range.first || v_range.first <= 0 ||
      v_range.second <= v_range.first)
    raise(Errc::bad_config, "phase_diagram needs positive, increasing axis ranges");

  PhaseDiagram pd;
  pd.r_axis.resize(static_cast<size_t>(nr));
  pd.v_axis.resize(static_cast<size_t>(nv));
  for (int i = 0; i < nr; ++i)
    pd.r_axis[static_cast<size_t>(i)] =
        r_range.first * std::pow(r_range.second / r_range.first, double(i) / (nr - 1));
  for (int j = 0; j < nv; ++j)
    pd.v_axis[static_cast<size_t>(j)] =
        v_range.first + (v_range.second - v_range.first) * double(j) / (nv - 1);

  pd.labels.resize(static_cast<size_t>(nr) * static_cast<size_t>(nv));
  bool seen[3] = {false, false, false};
  for (int i = 0; i < nr; ++i) {
    NeuronCircuit c{device.without_jitter(), pd.r_axis[static_cast<size_t>(i)], c_par, r_sample};
    for (int j = 0; j < nv; ++j) {
      Response r = classify_closed_form(c, pd.v_axis[static_cast<size_t>(j)]);
      pd.labels[static_cast<size_t>(i) * nv + static_cast<size_t>(j)] = r;
      seen[static_cast<int>(r)] = true;
    }
  }

  // connected components, 4-neighborhood
  std::vector<int> comp(pd.labels.size(), -1);
  int ncomp = 0;
  std::vector<size_t> stack;
  for (size_t s = 0; s < pd.labels.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = ncomp;
    stack.assign(1, s);
    while (!stack.empty()) {
      size_t cur = stack.back();
      stack.pop_back();
      size_t ir = cur / static_cast<size_t>(nv), iv = cur % static_cast<size_t>(nv);
      const size_t nbs[4] = {cur - static_cast<size_t>(nv), cur + static_cast<size_t>(nv),
                             cur - 1, cur + 1};
      const bool ok[4] = {ir > 0, ir + 1 < static_cast<size_t>(nr), iv > 0,
                          iv + 1 < static_cast<size_t>(nv)};
      for (int k = 0; k < 4; ++k) {
        if (!ok[k] || comp[nbs[k]] >= 0 || pd.labels[nbs[k]] != pd.labels[cur]) continue;
        comp[nbs[k]] = ncomp;
        stack.push_back(nbs[k]);
      }
    }
    ++ncomp;
  }
  pd.region_count = ncomp;

  // Triple point: the onset boundary B1(r) and latch boundary B2(r) are both
  // linear in r; the oscillating wedge exists where B2 > B1. Bisect their
  // crossing, then keep it only when all three labels occur in the grid and
  // the point lies inside the grid hull.
  if (seen[0] && seen[1] && seen[2]) {
    auto g = [&](double r) {
      return latch_boundary(device, r, r_sample) - unfiring_boundary(device, r, r_sample);
    };
    double lo = r_range.first, hi = r_range.second;
    if (g(lo) * g(hi) < 0) {
      for (int it = 0; it < 200 && (hi - lo) > 1e-6 * r_range.second; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(lo) * g(mid) <= 0) hi = mid;
        else lo = mid;
      }
      double r_star = 0.5 * (lo + hi);
      double v_star = unfiring_boundary(device, r_star, r_sample);
      if (v_star >= v_range.first && v_star <= v_range.second)
        pd.triple_point = std::make_pair(r_star, v_star);
    }
  }

  // time-domain cross-check of three random cells away from the boundaries
  std::mt19937_64 rng(crosscheck_seed);
  std::uniform_int_distribution<int> pick_r(0, nr - 1), pick_v(0, nv - 1);
  double v_span = v_range.second - v_range.first;
  pd.sim_crosscheck_ok = true;
  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 3; ++attempt) {
    size_t ir = static_cast<size_t>(pick_r(rng)), iv = static_cast<size_t>(pick_v(rng));
    double r = pd.r_axis[ir], v = pd.v_axis[iv];
    double d1 = std::abs(v - unfiring_boundary(device, r, r_sample));
    double d2 = std::abs(v - latch_boundary(device, r, r_sample));
    if (std::min(d1, d2) < 0.01 * v_span) continue;
    NeuronCircuit c{device.without_jitter(), r, c_par, r_sample};
    PeriodResult pr = closed_form_period(c, v);
    double dur, dt;
    if (pr.oscillating()) {
      dur = 14.0 * pr.period;
      dt = pr.period / 400.0;
    } else {
      double tau = c_par * (r * (device.r_ins + r_sample)) / (r + device.r_ins + r_sample);
      dur = 30.0 * tau;
      dt = dur / 4000.0;
    }
    Response sim = classify_response(simulate(c, DriveWaveform::constant(v, dur), dt));
    if (sim != pd.label_at(ir, iv)) pd.sim_crosscheck_ok = false;
    ++checked;
  }
  return pd;
}

double peak_frequency_voltage(const NeuronCircuit& circuit) {
  auto b = oscillation_band(circuit);
  if (!b) raise(Errc::no_oscillating_band, "circuit has no oscillating band");
  auto freq = [&](double v) {
    PeriodResult pr = closed_form_period(circuit, v);
    return pr.oscillating() ? 1.0 / pr.period : 0.0;
  };
  // the period is convex in drive, so frequency is unimodal: ternary search
  double lo = b->first, hi = b->second;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (freq(m1) < freq(m2)) lo = m1;
    else hi = m2;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> default_drive_points(const NeuronCircuit& circuit, int n) {
  auto b = oscillation_band(circuit);
  if (!b) raise(Errc::no_oscillating_band, "circuit has no oscillating band");
  double v_pk = peak_frequency_voltage(circuit);
  double v0 = b->first + 0.02 * (v_pk - b->first);
  std::vector<double> pts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    pts[static_cast<size_t>(i)] = v0 + (v_pk - v0) * double(i) / (n - 1);
  return pts;
}

namespace {

// steady-state oscillation frequency measured from simulated switch events
double simulated_frequency(const NeuronCircuit& c, double v_in, double period_hint) {
  double dur = 26.0 * period_hint;
  Trace tr = simulate(c, DriveWaveform::constant(v_in, dur), period_hint / 1000.0);
  std::vector<double> ups;
  for (const auto& e : tr.switch_events)
    if (e.to == Phase::Metallic && e.t > 4.0 * period_hint) ups.push_back(e.t);
  if (ups.size() < 2) return 0.0;
  return (ups.size() - 1) / (ups.back() - ups.front());
}

void require_increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) raise(Errc::bad_config, "drive points must be strictly increasing");
}

}  // namespace

CurveSeries vf_curve(const NeuronCircuit& circuit, const std::vector<double>& v_points,
                     uint64_t crosscheck_seed) {
  require_increasing(v_points);
  CurveSeries cs;
  cs.level = circuit.device.level;
  cs.x = v_points;
  cs.y.resize(v_points.size());
  cs.valid.resize(v_points.size());
  std::vector<size_t> osc_idx;
  for (size_t i = 0; i < v_points.size(); ++i) {
    PeriodResult pr = closed_form_period(circuit, v_points[i]);
    cs.valid[i] = pr.oscillating();
    cs.y[i] = pr.oscillating() ? 1.0 / pr.period : std::numeric_limits<double>::quiet_NaN();
    if (pr.oscillating()) osc_idx.push_back(i);
  }
  if (!osc_idx.empty()) {
    std::mt19937_64 rng(crosscheck_seed);
    std::uniform_int_distribution<size_t> pick(0, osc_idx.size() - 1);
    NeuronCircuit quiet{circuit.device.without_jitter(), circuit.r_series, circuit.c_par,
                        circuit.r_sample};
    for (int k = 0; k < 3; ++k) {
      size_t i = osc_idx[pick(rng)];
      double fs = simulated_frequency(quiet, cs.x[i], 1.0 / cs.y[i]);
      cs.crosscheck_rel_err = std::max(cs.crosscheck_rel_err, std::abs(fs - cs.y[i]) / cs.y[i]);
    }
  }
  return cs;
}

CurveSeries power_curve(const NeuronCircuit& circuit, const std::vector<double>& v_points,
                        uint64_t crosscheck_seed) {
  require_increasing(v_points);
  const DeviceParams& dev = circuit.device;
  double rs = circuit.r_series;
  CurveSeries cs;
  cs.level = dev.level;
  cs.x.resize(v_points.size());
  cs.y.resize(v_points.size());
  cs.valid.resize(v_points.size());

  auto avg_power = [&](double v_in, double period) {
    // time-average of v_in * (v_in - V)/r_series via exact segment integrals
    double v_up = dev.v_th * (dev.r_ins + circuit.r_sample) / dev.r_ins;
    double v_dn = dev.v_h * (dev.r_met + circuit.r_sample) / dev.r_met;
    double v_integral = 0.0;
    const double r_devs[2] = {dev.r_ins, dev.r_met};
    const double v0s[2] = {v_dn, v_up};
    const double v1s[2] = {v_up, v_dn};
    for (int s = 0; s < 2; ++s) {
      double rp = r_devs[s] + circuit.r_sample;
      double veq = v_in * rp / (rs + rp);
      double tau = circuit.c_par * (rs * rp) / (rs + rp);
      double t_seg = tau * std::log((veq - v0s[s]) / (veq - v1s[s]));
      v_integral += veq * t_seg + tau * (v0s[s] - veq) * (1.0 - std::exp(-t_seg / tau));
    }
    double v_bar = v_integral / period;
    return v_in * (v_in - v_bar) / rs;
  };

  std::vector<size_t> osc_idx;
  std::vector<double> periods(v_points.size(), 0.0);
  for (size_t i = 0; i < v_points.size(); ++i) {
    double v = v_points[i];
    PeriodResult pr = closed_form_period(circuit, v);
    if (pr.oscillating()) {
      cs.valid[i] = true;
      cs.x[i] = 1.0 / pr.period;
      cs.y[i] = avg_power(v, pr.period);
      periods[i] = pr.period;
      osc_idx.push_back(i);
    } else {
      // DC equilibrium of whichever state the stuck device is in
      cs.valid[i] = false;
      cs.x[i] = 0.0;
      double r_dev = pr.kind == PeriodResult::Kind::StuckMetallic ? dev.r_met : dev.r_ins;
      double rp = r_dev + circuit.r_sample;
      double veq = v * rp / (rs + rp);
      cs.y[i] = v * (v - veq) / rs;
    }
  }
  if (!osc_idx.empty()) {
    std::mt19937_64 rng(crosscheck_seed);
    std::uniform_int_distribution<size_t> pick(0, osc_idx.size() - 1);
    NeuronCircuit quiet{dev.without_jitter(), rs, circuit.c_par, circuit.r_sample};
    for (int k = 0; k < 3; ++k) {
      size_t i = osc_idx[pick(rng)];
      double T = periods[i];
      Trace tr = simulate(quiet, DriveWaveform::constant(v_points[i], 26.0 * T), T / 2000.0);
      // trapezoid average of the source power over the steady tail
      size_t i0 = static_cast<size_t>(4.0 * T / tr.dt);
      double acc = 0.0;
      for (size_t j = i0 + 1; j < tr.t.size(); ++j) {
        double p0 = v_points[i] * (v_points[i] - tr.v_node[j - 1]) / rs;
        double p1 = v_points[i] * (v_points[i] - tr.v_node[j]) / rs;
        acc += 0.5 * (p0 + p1) * tr.dt;
      }
      double p_sim = acc / (tr.t.back() - tr.t[i0]);
      cs.crosscheck_rel_err =
          std::max(cs.crosscheck_rel_err, std::abs(p_sim - cs.y[i]) / std::abs(cs.y[i]));
    }
  }
  return cs;
}

}  // namespace vo2snn
