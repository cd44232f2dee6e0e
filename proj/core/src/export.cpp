#include "vo2snn/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vo2snn/errors.hpp"

namespace vo2snn {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::io_error, "cannot write " + path);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  open_out(path) << content;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  auto out = open_out(path);
  out << "t,v_node,v_spike,state\n";
  for (size_t i = 0; i < trace.t.size(); ++i)
    out << num(trace.t[i]) << ',' << num(trace.v_node[i]) << ',' << num(trace.v_spike[i]) << ','
        << (trace.state[i] == Phase::Metallic ? "metallic" : "insulating") << '\n';
}

void write_iv_csv(const std::string& path, const IVCurve& curve) {
  auto out = open_out(path);
  out << "v_applied,i,branch\n";
  for (const auto& p : curve.points)
    out << num(p.v_applied) << ',' << num(p.i) << ',' << (p.branch == Branch::Up ? "up" : "down")
        << '\n';
}

void write_curve_csv(const std::string& path, const CurveSeries& series,
                     const std::string& x_name, const std::string& y_name) {
  auto out = open_out(path);
  out << x_name << ',' << y_name << ",oscillating\n";
  for (size_t i = 0; i < series.x.size(); ++i) {
    out << num(series.x[i]) << ',';
    if (std::isfinite(series.y[i])) out << num(series.y[i]);
    out << ',' << (series.valid[i] ? 1 : 0) << '\n';
  }
}

void write_phase_csv(const std::string& path, const PhaseDiagram& pd) {
  auto out = open_out(path);
  out << "r_series,v_in,label\n";
  for (size_t i = 0; i < pd.r_axis.size(); ++i)
    for (size_t j = 0; j < pd.v_axis.size(); ++j)
      out << num(pd.r_axis[i]) << ',' << num(pd.v_axis[j]) << ','
          << response_name(pd.label_at(i, j)) << '\n';
}

void write_raster_csv(const std::string& path, const RasterPlot& raster) {
  auto out = open_out(path);
  out << "neuron,t\n";
  for (size_t n = 0; n < raster.spike_times.size(); ++n)
    for (double t : raster.spike_times[n]) out << n << ',' << num(t) << '\n';
}

void write_confusion_csv(const std::string& path, const EvalResult& eval) {
  auto out = open_out(path);
  out << "true\\pred";
  for (int c = 0; c < 10; ++c) out << ',' << c;
  out << '\n';
  for (int r = 0; r < 10; ++r) {
    out << r;
    for (int c = 0; c < 10; ++c) out << ',' << eval.confusion(r, c);
    out << '\n';
  }
}

void write_cdf_csv(const std::string& path, const std::vector<double>& sorted_values) {
  auto out = open_out(path);
  out << "value,cumulative_fraction\n";
  for (size_t i = 0; i < sorted_values.size(); ++i)
    out << num(sorted_values[i]) << ',' << num(double(i + 1) / double(sorted_values.size()))
        << '\n';
}

namespace {

constexpr double kW = 720, kH = 480;
constexpr double kML = 80, kMR = 30, kMT = 40, kMB = 60;

struct AxisMap {
  double x0, x1, y0, y1;
  bool log_x;
  double px(double x) const {
    double t = log_x ? (std::log10(x) - std::log10(x0)) / (std::log10(x1) - std::log10(x0))
                     : (x - x0) / (x1 - x0);
    return kML + t * (kW - kML - kMR);
  }
  double py(double y) const {
    double t = (y - y0) / (y1 - y0);
    return kH - kMB - t * (kH - kMT - kMB);
  }
};

void svg_header(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
    << "</text>\n";
}

void svg_axes(std::ostringstream& s, const AxisMap& m, const std::string& xl,
              const std::string& yl) {
  s << "<rect x=\"" << kML << "\" y=\"" << kMT << "\" width=\"" << kW - kML - kMR
    << "\" height=\"" << kH - kMT - kMB << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double fx = m.log_x ? m.x0 * std::pow(m.x1 / m.x0, k / 4.0) : m.x0 + (m.x1 - m.x0) * k / 4.0;
    double fy = m.y0 + (m.y1 - m.y0) * k / 4.0;
    s << "<text x=\"" << num(m.px(fx)) << "\" y=\"" << kH - kMB + 18
      << "\" text-anchor=\"middle\" font-size=\"11\">" << num(fx) << "</text>\n"
      << "<text x=\"" << kML - 8 << "\" y=\"" << num(m.py(fy) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << num(fy) << "</text>\n";
  }
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
    << "\" text-anchor=\"middle\" font-size=\"13\">" << xl << "</text>\n"
    << "<text x=\"20\" y=\"" << kH / 2
    << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " << kH / 2
    << ")\">" << yl << "</text>\n";
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label, bool log_x) {
  size_t total = 0;
  for (const auto& s : series) total += s.x.size();
  if (total == 0) raise(Errc::empty_data, "nothing to plot");
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& sr : series)
    for (size_t i = 0; i < sr.x.size(); ++i) {
      if (!std::isfinite(sr.y[i])) continue;
      x0 = std::min(x0, sr.x[i]);
      x1 = std::max(x1, sr.x[i]);
      y0 = std::min(y0, sr.y[i]);
      y1 = std::max(y1, sr.y[i]);
    }
  if (x1 <= x0) { x0 -= 1; x1 += 1; }
  if (y1 <= y0) { y0 -= 1; y1 += 1; }
  AxisMap m{x0, x1, y0, y1, log_x && x0 > 0};
  std::ostringstream s;
  svg_header(s, title);
  svg_axes(s, m, x_label, y_label);
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* col = kColors[k % 6];
    std::ostringstream pts;
    size_t n_fin = 0;
    for (size_t i = 0; i < sr.x.size(); ++i) {
      if (!std::isfinite(sr.y[i])) continue;
      pts << num(m.px(sr.x[i])) << ',' << num(m.py(sr.y[i])) << ' ';
      ++n_fin;
    }
    if (n_fin > 1)
      s << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << col
        << "\" stroke-width=\"1.5\"/>\n";
    for (size_t i = 0; i < sr.x.size(); ++i)
      if (std::isfinite(sr.y[i]))
        s << "<circle cx=\"" << num(m.px(sr.x[i])) << "\" cy=\"" << num(m.py(sr.y[i]))
          << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
    if (!sr.label.empty())
      s << "<text x=\"" << kW - kMR - 8 << "\" y=\"" << kMT + 16 + 16 * double(k)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">" << sr.label
        << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_phase_diagram(const PhaseDiagram& pd, const std::string& title) {
  if (pd.labels.empty()) raise(Errc::empty_data, "empty phase diagram");
  AxisMap m{pd.r_axis.front(), pd.r_axis.back(), pd.v_axis.front(), pd.v_axis.back(), true};
  std::ostringstream s;
  svg_header(s, title);
  auto color = [](Response r) {
    switch (r) {
      case Response::UnFiring: return "#c6dbef";
      case Response::Oscillating: return "#74c476";
      case Response::Firing: return "#fb6a4a";
      default: return "#cccccc";
    }
  };
  size_t nr = pd.r_axis.size(), nv = pd.v_axis.size();
  for (size_t i = 0; i < nr; ++i) {
    double xl = m.px(i == 0 ? pd.r_axis[0] : std::sqrt(pd.r_axis[i - 1] * pd.r_axis[i]));
    double xr = m.px(i + 1 == nr ? pd.r_axis[nr - 1] : std::sqrt(pd.r_axis[i] * pd.r_axis[i + 1]));
    for (size_t j = 0; j < nv; ++j) {
      double dv = (pd.v_axis.back() - pd.v_axis.front()) / double(nv - 1);
      double yt = m.py(pd.v_axis[j] + dv / 2), yb = m.py(pd.v_axis[j] - dv / 2);
      s << "<rect x=\"" << num(xl) << "\" y=\"" << num(yt) << "\" width=\"" << num(xr - xl)
        << "\" height=\"" << num(yb - yt) << "\" fill=\"" << color(pd.label_at(i, j))
        << "\"/>\n";
    }
  }
  svg_axes(s, m, "series resistance [ohm]", "drive voltage [V]");
  if (pd.triple_point)
    s << "<circle cx=\"" << num(m.px(pd.triple_point->first)) << "\" cy=\""
      << num(m.py(pd.triple_point->second))
      << "\" r=\"5\" fill=\"black\" stroke=\"white\" stroke-width=\"1.5\"/>\n";
  s << "<text x=\"" << kML + 10 << "\" y=\"" << kMT + 16
    << "\" font-size=\"12\">blue: un-firing, green: oscillating, red: firing"
    << (pd.triple_point ? ", dot: triple point" : "") << "</text>\n</svg>\n";
  return s.str();
}

std::string svg_raster(const RasterPlot& raster, const std::string& title) {
  if (raster.spike_times.empty()) raise(Errc::empty_data, "empty raster");
  size_t n = raster.spike_times.size();
  AxisMap m{0.0, raster.window, -0.5, double(n) - 0.5, false};
  std::ostringstream s;
  svg_header(s, title);
  svg_axes(s, m, "time [s]", "neuron index");
  for (size_t i = 0; i < n; ++i)
    for (double t : raster.spike_times[i])
      s << "<line x1=\"" << num(m.px(t)) << "\" y1=\"" << num(m.py(double(i) - 0.35))
        << "\" x2=\"" << num(m.px(t)) << "\" y2=\"" << num(m.py(double(i) + 0.35))
        << "\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_histogram(const std::vector<double>& values, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
  if (values.empty()) raise(Errc::empty_data, "empty histogram");
  double ymax = *std::max_element(values.begin(), values.end());
  if (ymax <= 0) ymax = 1;
  AxisMap m{-0.5, double(values.size()) - 0.5, 0.0, ymax * 1.05, false};
  std::ostringstream s;
  svg_header(s, title);
  svg_axes(s, m, x_label, y_label);
  double bw = (kW - kML - kMR) / double(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    s << "<rect x=\"" << num(m.px(double(i) - 0.4)) << "\" y=\"" << num(m.py(values[i]))
      << "\" width=\"" << num(bw * 0.8) << "\" height=\"" << num(m.py(0) - m.py(values[i]))
      << "\" fill=\"#1f77b4\"/>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace vo2snn
