#include "trajgame/io/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trajgame {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double p = 0.05 * (hi - lo);
    lo -= p;
    hi += p;
  }
};

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("no series to plot");
  Range rx, ry;
  for (const auto& s : series) {
    if (s.x.size() != s.mean.size() || (!s.band.empty() && s.band.size() != s.x.size()))
      throw std::invalid_argument("series arrays differ in length");
    for (size_t k = 0; k < s.x.size(); ++k) {
      rx.take(s.x[k]);
      const double b = s.band.empty() ? 0.0 : s.band[k];
      ry.take(s.mean[k] - b);
      ry.take(s.mean[k] + b);
    }
  }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double v) { return kMarginLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto py = [&](double v) { return kMarginTop + (ry.hi - v) / (ry.hi - ry.lo) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << title << "</text>\n";

  // axes with 5 ticks each
  out << "<g stroke=\"#333\" stroke-width=\"1\" font-size=\"11\" font-family=\"sans-serif\">\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kMarginTop + plot_h << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double yv = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    out << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << fmt(px(xv)) << "\" y2=\"" << kMarginTop + plot_h + 4 << "\"/>\n";
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << kMarginTop + plot_h + 16
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">" << fmt(xv) << "</text>\n";
    out << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << fmt(py(yv)) << "\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py(yv) + 4)
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << fmt(yv) << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\""
      << "rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

  // bands first so curves draw on top
  for (const auto& s : series) {
    if (s.band.empty()) continue;
    out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (size_t k = 0; k < s.x.size(); ++k)
      out << fmt(px(s.x[k])) << ',' << fmt(py(s.mean[k] + s.band[k])) << ' ';
    for (size_t k = s.x.size(); k-- > 0;)
      out << fmt(px(s.x[k])) << ',' << fmt(py(s.mean[k] - s.band[k])) << ' ';
    out << "\"/>\n";
  }
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (size_t k = 0; k < s.x.size(); ++k)
      out << fmt(px(s.x[k])) << ',' << fmt(py(s.mean[k])) << ' ';
    out << "\"/>\n";
  }

  // legend
  double ly = kMarginTop + 8;
  for (const auto& s : series) {
    out << "<line x1=\"" << kMarginLeft + 10 << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << kMarginLeft + 34 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + 40 << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace trajgame
