#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>

#include "asve/io.hpp"
#include "asve/types.hpp"

namespace asve::svg {

namespace detail {

struct Panel {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

// polyline for y values on x positions in [0,1]; `step` draws a piecewise-constant curve
inline void polyline(std::ostream& out, const Panel& p, std::span<const double> xs, std::span<const double> ys,
                     bool step, const std::string& colour) {
  if (ys.empty()) return;
  auto [lo_it, hi_it] = std::minmax_element(ys.begin(), ys.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    hi += 0.5;
    lo -= 0.5;
  }
  auto px = [&](double x) { return p.x + x * p.w; };
  auto py = [&](double y) { return p.y + p.h - (y - lo) / (hi - lo) * p.h; };
  out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
  const std::size_t N = ys.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (step) {
      const double a = static_cast<double>(i) / static_cast<double>(N);
      const double b = static_cast<double>(i + 1) / static_cast<double>(N);
      out << io::format_double(px(a)) << ',' << io::format_double(py(ys[i])) << ' ' << io::format_double(px(b)) << ','
          << io::format_double(py(ys[i])) << ' ';
    } else {
      out << io::format_double(px(xs[i])) << ',' << io::format_double(py(ys[i])) << ' ';
    }
  }
  out << "\"/>\n";
  out << "<rect x=\"" << p.x << "\" y=\"" << p.y << "\" width=\"" << p.w << "\" height=\"" << p.h
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << p.x + 4 << "\" y=\"" << p.y + 12 << "\" font-size=\"10\">max " << io::format_double(hi)
      << "</text>\n";
  out << "<text x=\"" << p.x + 4 << "\" y=\"" << p.y + p.h - 4 << "\" font-size=\"10\">min " << io::format_double(lo)
      << "</text>\n";
}

}  // namespace detail

/// Price path on top, estimated volatility curve below; both against normalized time.
inline void plot(std::ostream& out, std::span<const double> times, std::span<const double> prices,
                 const VolatilityCurve& curve, const std::string& title = "") {
  const double W = 800.0;
  const double H = 500.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) out << "<text x=\"40\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
  const detail::Panel top{40.0, 30.0, W - 60.0, 200.0};
  const detail::Panel bottom{40.0, 270.0, W - 60.0, 200.0};
  detail::polyline(out, top, times, prices, false, "#1f4e9c");
  detail::polyline(out, bottom, curve.grid, curve.values, true, "#b22222");
  out << "<text x=\"40\" y=\"262\" font-size=\"11\">spot volatility</text>\n";
  out << "</svg>\n";
}

}  // namespace asve::svg
