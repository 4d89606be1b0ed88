#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "asve/error.hpp"

namespace asve {

/// Observed log-prices Y_1..Y_n on the equidistant grid i/n.
struct TickSeries {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  std::span<const double> view() const noexcept { return values; }
};

/// Piecewise-constant estimate t -> sigma^2(t) on [0,1].
///
/// Point p of the grid represents the cell [p/N, (p+1)/N) where N = size().
/// For an estimator curve the grid is the pre-averaging grid (i-1)/m, i = 2..m,
/// which places exactly one grid point in every cell.
struct VolatilityCurve {
  std::vector<double> grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  std::size_t cell_of(double t) const {
    if (values.empty()) throw InvalidInput("empty curve");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("evaluation point outside [0,1]");
    const auto n = values.size();
    return std::min(static_cast<std::size_t>(std::floor(t * static_cast<double>(n))), n - 1);
  }

  double operator()(double t) const { return values[cell_of(t)]; }

  /// Riemann integral over [0,1] with equal-width cells.
  double integral() const {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  /// Sum of squared jump sizes between consecutive cells.
  double total_squared_variation() const {
    double s = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double d = values[i] - values[i - 1];
      s += d * d;
    }
    return s;
  }
};

}  // namespace asve
