#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "primesig/errors.hpp"

namespace primesig {

enum class ChartKind { Line, Bars };

struct ChartStyle {
  int width = 960;
  int height = 420;
  std::string title;
  std::string x_label;
  std::string y_label;
  ChartKind kind = ChartKind::Line;
};

namespace detail {

// Fixed two-decimal pixel coordinates: deterministic across platforms and
// compact enough for large series.
inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Self-contained SVG chart of an (x, y) series. Meant for quick visual
// inspection of run outputs, not publication: one series, fixed margins,
// five ticks per axis.
inline std::string emit_svg_chart(const std::vector<std::pair<double, double>>& series,
                                  const ChartStyle& style) {
  if (series.size() < 2) throw ValidationError("chart needs at least two points");
  double x_min = series.front().first, x_max = x_min;
  double y_min = series.front().second, y_max = y_min;
  for (const auto& [x, y] : series) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (!(x_max > x_min)) throw ValidationError("chart x range is degenerate");
  if (y_max == y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  if (style.kind == ChartKind::Bars && y_min > 0.0) y_min = 0.0;

  const double ml = 64, mr = 16, mt = style.title.empty() ? 16 : 40, mb = 48;
  const double pw = style.width - ml - mr;
  const double ph = style.height - mt - mb;
  const auto sx = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
  const auto sy = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " +
         std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty())
    svg += "<text x=\"" + detail::px(style.width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           detail::xml_escape(style.title) + "</text>\n";

  // Axes box and ticks.
  svg += "<rect x=\"" + detail::px(ml) + "\" y=\"" + detail::px(mt) + "\" width=\"" +
         detail::px(pw) + "\" height=\"" + detail::px(ph) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 4.0;
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    svg += "<text x=\"" + detail::px(sx(fx)) + "\" y=\"" + detail::px(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(fx) + "</text>\n";
    svg += "<text x=\"" + detail::px(ml - 6) + "\" y=\"" + detail::px(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(fy) + "</text>\n";
    if (i > 0 && i < 4) {
      svg += "<line x1=\"" + detail::px(sx(fx)) + "\" y1=\"" + detail::px(mt) + "\" x2=\"" +
             detail::px(sx(fx)) + "\" y2=\"" + detail::px(mt + ph) +
             "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      svg += "<line x1=\"" + detail::px(ml) + "\" y1=\"" + detail::px(sy(fy)) + "\" x2=\"" +
             detail::px(ml + pw) + "\" y2=\"" + detail::px(sy(fy)) +
             "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    }
  }
  if (!style.x_label.empty())
    svg += "<text x=\"" + detail::px(ml + pw / 2) + "\" y=\"" + detail::px(style.height - 8.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::xml_escape(style.x_label) + "</text>\n";
  if (!style.y_label.empty())
    svg += "<text x=\"14\" y=\"" + detail::px(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 " +
           detail::px(mt + ph / 2) + ")\">" + detail::xml_escape(style.y_label) + "</text>\n";

  if (style.kind == ChartKind::Line) {
    svg += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) svg += ' ';
      svg += detail::px(sx(series[i].first)) + "," + detail::px(sy(series[i].second));
    }
    svg += "\"/>\n";
  } else {
    const double bw = std::max(1.0, 0.8 * pw / static_cast<double>(series.size()));
    const double y0 = sy(std::max(0.0, y_min));
    for (const auto& [x, y] : series) {
      const double top = sy(y);
      svg += "<rect x=\"" + detail::px(sx(x) - bw / 2) + "\" y=\"" + detail::px(std::min(top, y0)) +
             "\" width=\"" + detail::px(bw) + "\" height=\"" + detail::px(std::abs(y0 - top)) +
             "\" fill=\"#1f6fb2\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace primesig
