#pragma once

#include <string>
#include <vector>

#include "vo2snn/characterization.hpp"
#include "vo2snn/network.hpp"
#include "vo2snn/network_sim.hpp"
#include "vo2snn/oscillator.hpp"

namespace vo2snn {

// CSV writers. All numeric output uses "%.12g" so repeat runs are
// byte-identical.
void write_trace_csv(const std::string& path, const Trace& trace);
void write_iv_csv(const std::string& path, const IVCurve& curve);
void write_curve_csv(const std::string& path, const CurveSeries& series,
                     const std::string& x_name, const std::string& y_name);
void write_phase_csv(const std::string& path, const PhaseDiagram& pd);
void write_raster_csv(const std::string& path, const RasterPlot& raster);
void write_confusion_csv(const std::string& path, const EvalResult& eval);
void write_cdf_csv(const std::string& path, const std::vector<double>& sorted_values);

// Minimal standalone SVG plots with axes, tick labels and a legend. Output
// is deterministic for identical input. Raises EmptyData for empty input.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};
std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          bool log_x = false);
std::string svg_phase_diagram(const PhaseDiagram& pd, const std::string& title);
std::string svg_raster(const RasterPlot& raster, const std::string& title);
std::string svg_histogram(const std::vector<double>& values, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace vo2snn
