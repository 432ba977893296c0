#pragma once

#include <string>
#include <vector>

namespace trajgame {

// One curve with an optional +-1 sigma shaded band.
struct PlotSeries {
  std::string label;
  std::string color;  // e.g. "#d62728"
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> band;  // per-point sigma; empty = no band
};

// Self-contained SVG line plot with deterministic element ordering.
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace trajgame
