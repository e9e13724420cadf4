#pragma once

// Minimal SVG plotting: axes plus one polyline per series (or circles for
// scatter data).  No styling beyond stroke colors.

#include "xxzpin/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace xxzpin {

struct Series {
  std::vector<double> x, y;
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[i % 8];
}

struct Frame {
  double xmin, xmax, ymin, ymax;
  static constexpr double w = 720, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;

  double px(double x) const { return ml + (x - xmin) / span(xmin, xmax) * (w - ml - mr); }
  double py(double y) const { return h - mb - (y - ymin) / span(ymin, ymax) * (h - mt - mb); }

  static double span(double lo, double hi) { return hi > lo ? hi - lo : 1.0; }
};

inline Frame fit_frame(const std::vector<Series>& series) {
  Frame f{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (const Series& s : series) {
    for (double v : s.x) {
      f.xmin = std::min(f.xmin, v);
      f.xmax = std::max(f.xmax, v);
    }
    for (double v : s.y) {
      f.ymin = std::min(f.ymin, v);
      f.ymax = std::max(f.ymax, v);
    }
  }
  if (f.xmin > f.xmax) f = Frame{0, 1, 0, 1};
  return f;
}

inline void emit_axes(std::string& svg, const Frame& f, const std::string& xlabel,
                      const std::string& ylabel) {
  auto num = [](double v) { return format_number(v); };
  svg += "<line x1=\"" + num(f.ml) + "\" y1=\"" + num(f.h - f.mb) + "\" x2=\"" + num(f.w - f.mr) +
         "\" y2=\"" + num(f.h - f.mb) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(f.ml) + "\" y1=\"" + num(f.mt) + "\" x2=\"" + num(f.ml) + "\" y2=\"" +
         num(f.h - f.mb) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(f.ml) + "\" y=\"" + num(f.h - f.mb + 18) +
         "\" font-size=\"11\">" + num(f.xmin) + "</text>\n";
  svg += "<text x=\"" + num(f.w - f.mr - 40) + "\" y=\"" + num(f.h - f.mb + 18) +
         "\" font-size=\"11\">" + num(f.xmax) + "</text>\n";
  svg += "<text x=\"6\" y=\"" + num(f.h - f.mb) + "\" font-size=\"11\">" + num(f.ymin) +
         "</text>\n";
  svg += "<text x=\"6\" y=\"" + num(f.mt + 10) + "\" font-size=\"11\">" + num(f.ymax) +
         "</text>\n";
  svg += "<text x=\"" + num((f.ml + f.w) / 2) + "\" y=\"" + num(f.h - 8) +
         "\" font-size=\"12\">" + xlabel + "</text>\n";
  svg += "<text x=\"10\" y=\"14\" font-size=\"12\">" + ylabel + "</text>\n";
}

}  // namespace detail

// Line chart: one polyline per series.
inline std::string svg_line_chart(const std::vector<Series>& series, const std::string& xlabel,
                                  const std::string& ylabel,
                                  std::optional<std::pair<double, double>> yclip = {}) {
  detail::Frame f = detail::fit_frame(series);
  if (yclip) {
    f.ymin = yclip->first;
    f.ymax = yclip->second;
  }
  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
      "viewBox=\"0 0 720 480\">\n";
  detail::emit_axes(svg, f, xlabel, ylabel);
  for (std::size_t s = 0; s < series.size(); ++s) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += detail::palette(s);
    svg += "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      const double yv = std::clamp(series[s].y[i], f.ymin, f.ymax);
      svg += format_number(f.px(series[s].x[i])) + "," + format_number(f.py(yv)) + " ";
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Scatter chart: one circle per point.
inline std::string svg_scatter_chart(const std::vector<Series>& series, const std::string& xlabel,
                                     const std::string& ylabel,
                                     std::optional<std::pair<double, double>> yclip = {}) {
  detail::Frame f = detail::fit_frame(series);
  if (yclip) {
    f.ymin = yclip->first;
    f.ymax = yclip->second;
  }
  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
      "viewBox=\"0 0 720 480\">\n";
  detail::emit_axes(svg, f, xlabel, ylabel);
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (series[s].y[i] < f.ymin || series[s].y[i] > f.ymax) continue;
      svg += "<circle cx=\"" + format_number(f.px(series[s].x[i])) + "\" cy=\"" +
             format_number(f.py(series[s].y[i])) + "\" r=\"1.5\" fill=\"";
      svg += detail::palette(s);
      svg += "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

inline void save_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
}

}  // namespace xxzpin
