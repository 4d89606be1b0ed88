#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "asve/error.hpp"
#include "asve/types.hpp"

namespace asve {

/// Orthonormal Haar coefficients of a series reflect-padded to length 2^J.
///
/// Level j (j0 <= j < J) holds 2^j details; detail (j,k) is supported on the padded
/// index range [k 2^{J-j}, (k+1) 2^{J-j}). A detail computed from a series of Z values
/// with spacing 1/m is about sqrt(2^J) <sigma^2, psi_{j,k}>.
struct WaveletCoefficients {
  int j0 = 0;
  int depth = 0;  // J
  std::vector<double> scaling;
  std::vector<std::vector<double>> details;  // details[j - j0]
  std::size_t len = 0;

  std::size_t padded_len() const noexcept { return std::size_t{1} << depth; }
  int finest_level() const noexcept { return depth - 1; }
  int num_levels() const noexcept { return static_cast<int>(details.size()); }

  std::vector<double>& level(int j) { return details.at(static_cast<std::size_t>(j - j0)); }
  const std::vector<double>& level(int j) const { return details.at(static_cast<std::size_t>(j - j0)); }

  /// Support of detail (j,k) in padded index space, [first, last).
  std::pair<std::size_t, std::size_t> support(int j, std::size_t k) const {
    const std::size_t width = std::size_t{1} << (depth - j);
    return {k * width, (k + 1) * width};
  }

  /// True when the detail's support lies entirely in the padding.
  bool padding_born(int j, std::size_t k) const { return support(j, k).first >= len; }

  /// Number of details at level j whose support meets the original series.
  std::size_t live_count(int j) const {
    const std::size_t width = std::size_t{1} << (depth - j);
    return (len + width - 1) / width;
  }
};

namespace detail {

inline int dyadic_depth(std::size_t n) {
  int J = 0;
  while ((std::size_t{1} << J) < n) ++J;
  return J;
}

inline std::vector<double> reflect_pad(std::span<const double> v, std::size_t target) {
  std::vector<double> out(v.begin(), v.end());
  out.reserve(target);
  const std::size_t n = v.size();
  std::size_t k = 0;
  while (out.size() < target) {
    // Symmetric reflection about the right end, period 2n.
    const std::size_t r = k % (2 * n);
    out.push_back(r < n ? v[n - 1 - r] : v[r - n]);
    ++k;
  }
  return out;
}

}  // namespace detail

/// Forward orthonormal Haar transform down to coarsest level j0 (clamped to J).
inline WaveletCoefficients dwt(std::span<const double> values, int j0 = 2) {
  if (values.empty()) throw InvalidInput("dwt: empty input");
  if (j0 < 0) throw InvalidInput("dwt: negative coarsest level");
  WaveletCoefficients c;
  c.len = values.size();
  c.depth = detail::dyadic_depth(values.size());
  c.j0 = std::min(j0, c.depth);
  std::vector<double> approx = detail::reflect_pad(values, c.padded_len());
  c.details.resize(static_cast<std::size_t>(c.depth - c.j0));
  constexpr double r = std::numbers::sqrt2 / 2.0;
  for (int j = c.depth - 1; j >= c.j0; --j) {
    const std::size_t half = std::size_t{1} << j;
    std::vector<double> next(half);
    auto& d = c.level(j);
    d.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
      next[k] = r * (approx[2 * k] + approx[2 * k + 1]);
      d[k] = r * (approx[2 * k] - approx[2 * k + 1]);
    }
    approx = std::move(next);
  }
  c.scaling = std::move(approx);
  return c;
}

/// Inverse transform on the full padded length.
inline std::vector<double> synthesize_padded(const WaveletCoefficients& c) {
  if (c.scaling.size() != (std::size_t{1} << c.j0) ||
      c.details.size() != static_cast<std::size_t>(c.depth - c.j0))
    throw InvalidInput("idwt: inconsistent coefficient layout");
  std::vector<double> approx = c.scaling;
  constexpr double r = std::numbers::sqrt2 / 2.0;
  for (int j = c.j0; j < c.depth; ++j) {
    const auto& d = c.level(j);
    if (d.size() != (std::size_t{1} << j)) throw InvalidInput("idwt: inconsistent level size");
    std::vector<double> next(2 * d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      next[2 * k] = r * (approx[k] + d[k]);
      next[2 * k + 1] = r * (approx[k] - d[k]);
    }
    approx = std::move(next);
  }
  return approx;
}

inline std::vector<double> idwt(const WaveletCoefficients& c) {
  auto full = synthesize_padded(c);
  full.resize(c.len);
  return full;
}

/// Haar synthesis evaluated at points of [0,1]; sample p of the unpadded series
/// covers [p/len, (p+1)/len).
inline VolatilityCurve eval_curve(const WaveletCoefficients& c, std::span<const double> t_grid) {
  const auto series = idwt(c);
  VolatilityCurve curve;
  curve.grid.assign(t_grid.begin(), t_grid.end());
  curve.values.resize(t_grid.size());
  const double n = static_cast<double>(c.len);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("eval_curve: point outside [0,1]");
    const auto p = std::min(static_cast<std::size_t>(std::floor(t * n)), c.len - 1);
    curve.values[i] = series[p];
  }
  return curve;
}

}  // namespace asve
