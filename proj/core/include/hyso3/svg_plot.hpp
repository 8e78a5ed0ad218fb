#pragma once

#include <string>
#include <vector>

namespace hyso3 {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 420;
  /// Series longer than this are decimated (extrema kept per bucket).
  int max_points = 1500;
};

/// Renders a line chart as a standalone SVG document.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_svg(const std::string& path, const PlotSpec& spec,
               const std::vector<PlotSeries>& series);

}  // namespace hyso3
