#pragma once

#include <string>
#include <vector>

namespace adascope {

struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color;  // empty picks from the default palette
};

// Self-contained line chart, no external CSS or fonts. Non-finite points are
// dropped; a degenerate axis range is padded so the plot stays visible.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width = 720, int height = 440);

}  // namespace adascope
