#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "asve/error.hpp"
#include "asve/types.hpp"

namespace asve {

/// Trades in session order: strictly increasing timestamps (seconds) and positive prices.
struct RawTickData {
  std::vector<double> times;
  std::vector<double> prices;

  std::size_t size() const noexcept { return times.size(); }

  void validate() const {
    if (times.size() != prices.size()) throw InvalidInput("tick data: times and prices differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i])) throw InvalidInput("tick data: non-finite timestamp");
      if (i > 0 && !(times[i] > times[i - 1])) throw InvalidInput("tick data: timestamps not strictly increasing");
      if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) throw InvalidInput("tick data: non-positive price");
    }
  }
};

/// Trading intensity on a uniform grid of normalized real time s in [0,1].
/// tick_coord[p] is the fraction of trades at or before grid[p], i.e. the tick-time
/// coordinate of that real-time point.
struct IntensityCurve {
  std::vector<double> grid;
  std::vector<double> nu;
  std::vector<double> tick_coord;
  double bandwidth = 0.0;

  double integral() const {
    if (nu.empty()) return 0.0;
    double s = 0.0;
    for (double v : nu) s += v;
    return s / static_cast<double>(nu.size());
  }
};

/// Log-prices relative to `log_ref`, indexed by trade count.
inline TickSeries to_tick_time(const RawTickData& raw, double log_ref) {
  if (!(log_ref > 0.0)) throw InvalidInput("to_tick_time: reference price must be positive");
  TickSeries out;
  out.values.reserve(raw.size());
  for (double p : raw.prices) {
    if (!(p > 0.0)) throw InvalidInput("to_tick_time: non-positive price");
    out.values.push_back(std::log(p / log_ref));
  }
  return out;
}

inline std::vector<double> normalized_times(const RawTickData& raw) {
  if (raw.size() < 2) throw InvalidInput("normalized_times: need at least two trades");
  const double t0 = raw.times.front();
  const double span = raw.times.back() - t0;
  if (!(span > 0.0)) throw InvalidInput("normalized_times: session has zero length");
  std::vector<double> s(raw.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (raw.times[i] - t0) / span;
  s.back() = 1.0;
  return s;
}

/// Windowed trade counts nu(s) = #{t_i in [s-delta, s+delta], i >= 1} / (n * width), where t_0 opens
/// the session, n + 1 = raw.size(), and width is the window clipped to [0,1]. delta is set so an
/// unclipped window holds `target_count` trades on average (default 2 sqrt(n)). Evaluated at the
/// midpoints of `cells` uniform cells.
inline IntensityCurve estimate_intensity(const RawTickData& raw, std::size_t cells, double target_count = 0.0) {
  raw.validate();
  if (raw.size() < 2) throw TooFewObservations("estimate_intensity: need at least two trades");
  const std::size_t n = raw.size() - 1;
  const double nn = static_cast<double>(n);
  const double K = target_count > 0.0 ? target_count : 2.0 * std::sqrt(nn);
  if (nn < 4.0 * K) throw TooFewObservations("estimate_intensity: need n >= 4 * target_count");
  if (cells == 0) throw InvalidInput("estimate_intensity: need at least one cell");
  const auto all = normalized_times(raw);
  const std::span<const double> s(all.data() + 1, n);
  IntensityCurve out;
  out.bandwidth = K / (2.0 * nn);
  out.grid.resize(cells);
  out.nu.resize(cells);
  out.tick_coord.resize(cells);
  for (std::size_t p = 0; p < cells; ++p) {
    const double x = (static_cast<double>(p) + 0.5) / static_cast<double>(cells);
    const double lo = std::max(0.0, x - out.bandwidth);
    const double hi = std::min(1.0, x + out.bandwidth);
    const auto a = std::lower_bound(s.begin(), s.end(), lo);
    const auto b = std::upper_bound(s.begin(), s.end(), hi);
    out.grid[p] = x;
    out.nu[p] = static_cast<double>(b - a) / (nn * (hi - lo));
    out.tick_coord[p] = static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) / nn;
  }
  return out;
}

/// Real-time volatility nu(s) * sigma^2_TT(u(s)) on the intensity grid; the tick-time curve is
/// read piecewise constantly at the tick coordinate of each grid point.
inline VolatilityCurve tick_to_real(const VolatilityCurve& sigma_tt, const IntensityCurve& nu) {
  if (nu.grid.size() != nu.nu.size() || nu.tick_coord.size() != nu.nu.size())
    throw InvalidInput("tick_to_real: malformed intensity curve");
  if (sigma_tt.values.empty()) throw InvalidInput("tick_to_real: empty volatility curve");
  VolatilityCurve out;
  out.grid = nu.grid;
  out.values.resize(nu.nu.size());
  for (std::size_t p = 0; p < nu.nu.size(); ++p)
    out.values[p] = nu.nu[p] * sigma_tt(std::clamp(nu.tick_coord[p], 0.0, 1.0));
  return out;
}

}  // namespace asve
