#include "adascope/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace adascope {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Empty or single-valued data still needs a nonzero span to map onto pixels.
  void finalize() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      double pad = std::max(1e-6, std::abs(lo) * 0.1 + 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width, int height) {
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  Range xr, yr;
  for (const auto& s : series) {
    std::size_t n = std::min(s.xs.size(), s.ys.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      xr.grow(s.xs[i]);
      yr.grow(s.ys[i]);
    }
  }
  xr.finalize();
  yr.finalize();

  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2.0 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << escape_xml(title) << "</text>\n";

  // axes
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << top + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
     << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";

  // min/max tick labels
  os << "<text x=\"" << left << "\" y=\"" << top + plot_h + 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xr.lo)
     << "</text>\n";
  os << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xr.hi)
     << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + plot_h
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yr.lo)
     << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 10
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yr.hi)
     << "</text>\n";

  // axis labels
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << escape_xml(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + plot_h / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << top + plot_h / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string color = s.color.empty() ? kPalette[si % kPaletteSize] : s.color;
    std::ostringstream pts;
    std::size_t n = std::min(s.xs.size(), s.ys.size());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (kept) pts << ' ';
      pts << fmt(px(s.xs[i])) << ',' << fmt(py(s.ys[i]));
      ++kept;
    }
    if (kept == 0) continue;
    if (kept == 1) {
      // a lone point would render an invisible polyline
      std::string p = pts.str();
      std::size_t comma = p.find(',');
      os << "<circle cx=\"" << p.substr(0, comma) << "\" cy=\"" << p.substr(comma + 1)
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
         << pts.str() << "\"/>\n";
    }
    double ly = top + 14.0 * static_cast<double>(si);
    os << "<line x1=\"" << left + plot_w - 130 << "\" y1=\"" << ly << "\" x2=\""
       << left + plot_w - 110 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + plot_w - 104 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
       << "</text>\n";
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace adascope
