#pragma once

#include <string>
#include <vector>

namespace iongrad {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  bool log_y = false;
};

/// Self-contained SVG line plot.
std::string render_svg(const Plot& plot);

}  // namespace iongrad
