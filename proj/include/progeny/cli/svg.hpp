#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "progeny/cli/csv.hpp"
#include "progeny/error.hpp"

namespace progeny::cli {

struct Series {
  std::string name;
  std::vector<double> x{};
  std::vector<double> y{};
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick positions at a 1-2-5 step covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (raw <= step) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) t.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return t;
}

}  // namespace detail

inline std::string render_svg(const Chart& chart) {
  constexpr double width = 800, height = 500, left = 80, right = 190, top = 40, bottom = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw DomainError("series '" + s.name + "' has mismatched x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!(x_lo <= x_hi)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_lo == x_hi) x_lo -= 0.5, x_hi += 0.5;
  if (y_lo == y_hi) y_lo -= 0.5, y_hi += 0.5;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * ph; };

  using detail::px;
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
       "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + px(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       detail::escape_xml(chart.title) + "</text>\n";
  o += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : detail::nice_ticks(x_lo, x_hi)) {
    const double X = sx(t);
    o += "<line x1=\"" + px(X) + "\" y1=\"" + px(top + ph) + "\" x2=\"" + px(X) + "\" y2=\"" + px(top + ph + 5) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + px(X) + "\" y=\"" + px(top + ph + 18) + "\" text-anchor=\"middle\">" + detail::num(t) +
         "</text>\n";
  }
  for (double t : detail::nice_ticks(y_lo, y_hi)) {
    const double Y = sy(t);
    o += "<line x1=\"" + px(left - 5) + "\" y1=\"" + px(Y) + "\" x2=\"" + px(left) + "\" y2=\"" + px(Y) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + px(left - 8) + "\" y=\"" + px(Y + 4) + "\" text-anchor=\"end\">" + detail::num(t) +
         "</text>\n";
  }
  o += "<text x=\"" + px(left + pw / 2) + "\" y=\"" + px(height - 15) + "\" text-anchor=\"middle\">" +
       detail::escape_xml(chart.x_label) + "</text>\n";
  o += "<text x=\"20\" y=\"" + px(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       px(top + ph / 2) + ")\">" + detail::escape_xml(chart.y_label) + "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const std::string colour = palette[k % std::size(palette)];
    const std::string style = "fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"" +
                              (s.dashed ? std::string(" stroke-dasharray=\"6 4\"") : std::string());
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) o += "<polyline " + style + " points=\"" + pts + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += px(sx(s.x[i])) + "," + px(sy(s.y[i]));
    }
    flush();
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    const double lx = left + pw + 15;
    o += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(lx + 25) + "\" y2=\"" + px(ly) + "\" " +
         style + "/>\n";
    o += "<text x=\"" + px(lx + 32) + "\" y=\"" + px(ly + 4) + "\">" + detail::escape_xml(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

inline void write_svg(const Chart& chart, const std::filesystem::path& path) { write_text(path, render_svg(chart)); }

}  // namespace progeny::cli
