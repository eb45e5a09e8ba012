#include "gnnsteal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string text(double x, double y, const std::string& body, const char* anchor = "middle", int size = 12) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) + "\" text-anchor=\"" +
         anchor + "\">" + escape(body) + "</text>\n";
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w, 0) + "\" height=\"" + num(h, 0) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Matrix& values, double lo, double hi) {
  if (static_cast<std::size_t>(values.rows()) != row_labels.size() ||
      static_cast<std::size_t>(values.cols()) != col_labels.size()) {
    throw InvalidArgument("heatmap_svg: labels do not match the value grid");
  }
  const double cell = 70, left = 90, top = 60;
  const double w = left + cell * static_cast<double>(col_labels.size()) + 20;
  const double h = top + cell * static_cast<double>(row_labels.size()) + 20;
  std::string svg = header(w, h);
  svg += text(w / 2, 24, title, "middle", 14);
  for (std::size_t c = 0; c < col_labels.size(); ++c) svg += text(left + cell * (static_cast<double>(c) + 0.5), top - 8, col_labels[c]);
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    const double y = top + cell * static_cast<double>(r);
    svg += text(left - 8, y + cell / 2 + 4, row_labels[r], "end");
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double x = left + cell * static_cast<double>(c);
      const double v = values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      std::string fill = "#cccccc", label = "n/a", ink = "black";
      if (!std::isnan(v)) {
        const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
        const int red = static_cast<int>(std::lround(255 - t * (255 - 8)));
        const int green = static_cast<int>(std::lround(255 - t * (255 - 48)));
        const int blue = static_cast<int>(std::lround(255 - t * (255 - 107)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", red, green, blue);
        fill = buf;
        label = num(v, 3);
        if (t > 0.55) ink = "white";
      }
      svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
             "\" fill=\"" + fill + "\" stroke=\"white\"/>\n";
      svg += "<text x=\"" + num(x + cell / 2) + "\" y=\"" + num(y + cell / 2 + 4) +
             "\" font-size=\"12\" text-anchor=\"middle\" fill=\"" + ink + "\">" + label + "</text>\n";
    }
  }
  return svg + "</svg>\n";
}

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series) {
  const double w = 560, h = 360, left = 60, right = 150, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (std::isnan(s.ys[i])) continue;
      const double e = i < s.errors.size() && !std::isnan(s.errors[i]) ? s.errors[i] : 0.0;
      x0 = std::min(x0, s.xs[i]);
      x1 = std::max(x1, s.xs[i]);
      y0 = std::min(y0, s.ys[i] - e);
      y1 = std::max(y1, s.ys[i] + e);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.05, y1 += 0.05;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg = header(w, h);
  svg += text(left + pw / 2, 22, title, "middle", 14);
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    svg += text(px(xv), top + ph + 16, num(xv, 3), "middle", 10);
    svg += text(left - 4, py(yv) + 3, num(yv, 3), "end", 10);
  }
  svg += text(left + pw / 2, h - 10, x_label);
  svg += "<text x=\"14\" y=\"" + num(top + ph / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         num(top + ph / 2) + ")\">" + escape(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (std::isnan(s.ys[i])) continue;
      points += num(px(s.xs[i])) + "," + num(py(s.ys[i])) + " ";
      svg += "<circle cx=\"" + num(px(s.xs[i])) + "\" cy=\"" + num(py(s.ys[i])) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
      if (i < s.errors.size() && !std::isnan(s.errors[i]) && s.errors[i] > 0) {
        svg += "<line x1=\"" + num(px(s.xs[i])) + "\" y1=\"" + num(py(s.ys[i] - s.errors[i])) + "\" x2=\"" +
               num(px(s.xs[i])) + "\" y2=\"" + num(py(s.ys[i] + s.errors[i])) + "\" stroke=\"" + colour + "\"/>\n";
      }
    }
    if (!points.empty()) {
      points.pop_back();
      svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = top + 14.0 * static_cast<double>(k) + 8;
    svg += "<line x1=\"" + num(left + pw + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 28) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    svg += text(left + pw + 32, ly + 4, s.name, "start", 10);
  }
  return svg + "</svg>\n";
}

}  // namespace gnnsteal
