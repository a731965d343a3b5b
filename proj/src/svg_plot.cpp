#include "iongrad/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "iongrad/csv.hpp"

namespace iongrad {

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double v) { return plot.log_y ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      if (plot.log_y && s.y[i] <= 0) continue;
      y0 = std::min(y0, ty(plot.log_y ? s.y[i] : s.y[i] - e));
      y1 = std::max(y1, ty(s.y[i] + e));
    }
  }
  if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    const double xp = kLeft + pw * k / 4, yp = kTop + ph * (1.0 - k / 4.0);
    os << "<text x=\"" << xp << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
       << num(xv, 4) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << yp + 4 << "\" text-anchor=\"end\">"
       << num(plot.log_y ? std::pow(10.0, yv) : yv, 4) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
     << escape(plot.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(plot.y_label) << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = kColors[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (plot.log_y && s.y[i] <= 0) continue;
      os << num(px(s.x[i]), 6) << ',' << num(py(s.y[i]), 6) << ' ';
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (plot.log_y && s.y[i] <= 0) continue;
      if (s.markers)
        os << "<circle cx=\"" << num(px(s.x[i]), 6) << "\" cy=\"" << num(py(s.y[i]), 6)
           << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      if (i < s.err.size() && s.err[i] > 0) {
        const double lo = plot.log_y ? std::max(s.y[i] - s.err[i], s.y[i] * 1e-3) : s.y[i] - s.err[i];
        os << "<line x1=\"" << num(px(s.x[i]), 6) << "\" x2=\"" << num(px(s.x[i]), 6) << "\" y1=\""
           << num(py(lo), 6) << "\" y2=\"" << num(py(s.y[i] + s.err[i]), 6) << "\" stroke=\"" << color
           << "\"/>\n";
      }
    }
    os << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 16 + 14 * si
       << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace iongrad
