#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mmroute {

// Minimal cost-performance chart: router frontiers as polylines, single-model
// baselines as labelled markers.

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (cost, perf)
  bool markers_only = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "mean normalized cost";
  std::string y_label = "mean performance";
  bool log_x = true;
  int width = 760;
  int height = 480;
};

std::string render_frontier_svg(std::span<const PlotSeries> series, const PlotOptions& options);

// Escapes &, <, >, and quotes for use in SVG text and attributes.
std::string xml_escape(const std::string& s);

}  // namespace mmroute
