#include "mmroute/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mmroute {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string render_frontier_svg(std::span<const PlotSeries> series, const PlotOptions& options) {
  const double left = 70, right = 190, top = 40, bottom = 55;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double min_positive = x_lo;
  double y_lo = 1.0, y_hi = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      if (x > 0) min_positive = std::min(min_positive, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  y_lo = std::max(0.0, std::floor(y_lo * 10.0) / 10.0);
  y_hi = std::min(1.0, std::ceil(y_hi * 10.0) / 10.0);
  if (y_hi <= y_lo) y_hi = y_lo + 0.1;

  // Zero costs cannot sit on a log axis; they are drawn at the left edge.
  const bool log_x = options.log_x && std::isfinite(min_positive);
  double ax_lo, ax_hi;
  if (log_x) {
    ax_lo = std::floor(std::log10(min_positive));
    ax_hi = std::ceil(std::log10(std::max(x_hi, min_positive)));
    if (ax_hi <= ax_lo) ax_hi = ax_lo + 1;
  } else {
    ax_lo = x_lo;
    ax_hi = x_hi > x_lo ? x_hi : x_lo + 1.0;
  }
  auto px = [&](double x) {
    double t = log_x ? (std::log10(std::max(x, std::pow(10.0, ax_lo))) - ax_lo) / (ax_hi - ax_lo)
                     : (x - ax_lo) / (ax_hi - ax_lo);
    return left + t * plot_w;
  };
  auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << xml_escape(options.title) << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Axes ticks.
  if (log_x) {
    for (double e = ax_lo; e <= ax_hi + 1e-9; e += 1.0) {
      const double x = left + (e - ax_lo) / (ax_hi - ax_lo) * plot_w;
      svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(top) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 16)
          << "\" text-anchor=\"middle\">" << tick_label(std::pow(10.0, e)) << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = ax_lo + (ax_hi - ax_lo) * i / 5.0;
      const double x = px(v);
      svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(top) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 16)
          << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
    }
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = y_lo + (y_hi - y_lo) * i / 5.0;
    const double y = py(v);
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + plot_w)
        << "\" y2=\"" << num(y) << "\" stroke=\"#eee\"/>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 12)
      << "\" text-anchor=\"middle\">" << xml_escape(options.x_label)
      << (log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text transform=\"translate(18," << num(top + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(options.y_label) << "</text>\n";

  std::size_t color = 0;
  double legend_y = top + 10;
  for (const auto& s : series) {
    const char* stroke = kPalette[color++ % std::size(kPalette)];
    if (s.markers_only) {
      for (const auto& [x, y] : s.points)
        svg << "<rect x=\"" << num(px(x) - 4) << "\" y=\"" << num(py(y) - 4)
            << "\" width=\"8\" height=\"8\" fill=\"" << stroke << "\"><title>"
            << xml_escape(s.label) << "</title></rect>\n";
    } else if (!s.points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
      for (const auto& [x, y] : s.points) svg << num(px(x)) << ',' << num(py(y)) << ' ';
      svg << "\"/>\n";
      for (const auto& [x, y] : s.points)
        svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\""
            << stroke << "\"/>\n";
    }
    svg << "<rect x=\"" << num(left + plot_w + 14) << "\" y=\"" << num(legend_y - 8)
        << "\" width=\"10\" height=\"10\" fill=\"" << stroke << "\"/>\n";
    svg << "<text x=\"" << num(left + plot_w + 30) << "\" y=\"" << num(legend_y + 1) << "\">"
        << xml_escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mmroute
