#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asve/error.hpp"
#include "asve/numerics.hpp"
#include "asve/types.hpp"

namespace asve {

/// Integrals of a normalized pre-average function that enter the tuning formulas:
///   lag1_diffusion = int_0^1 Lambda(u) Lambda(1-u) du
///   lag1_noise     = int_0^1 lambda(u) lambda(1-u) du
///   l2_norm_sq     = ||lambda||^2 on [0,1]
struct KernelIntegrals {
  double lag1_diffusion;
  double lag1_noise;
  double l2_norm_sq;
};

/// An antisymmetric weight function lambda on [0,2], normalized so that
/// 2 * int_0^1 (int_0^s lambda)^2 ds = 1. Evaluates to 0 outside [0,2].
class PreAverageFunction {
 public:
  using Fn = std::function<double(double)>;

  PreAverageFunction(std::string name, Fn raw, double norm_const, Fn raw_primitive = {},
                     int catalog_index = 0, std::optional<KernelIntegrals> closed = std::nullopt)
      : name_(std::move(name)),
        raw_(std::move(raw)),
        raw_primitive_(std::move(raw_primitive)),
        norm_const_(norm_const),
        catalog_index_(catalog_index),
        closed_(closed) {}

  double operator()(double s) const {
    if (s < 0.0 || s > 2.0) return 0.0;
    return raw_(s) / norm_const_;
  }

  /// Lambda(u) = -int_0^u lambda(v) dv, zero outside [0,2].
  double antiderivative(double u) const {
    if (u <= 0.0 || u >= 2.0) return 0.0;
    return -raw_primitive(u) / norm_const_;
  }

  double raw(double s) const { return raw_(s); }

  double raw_primitive(double u) const {
    if (raw_primitive_) return raw_primitive_(u);
    const double breaks[] = {1.0};
    return numerics::integrate_piecewise(raw_, 0.0, u, breaks, 1e-12);
  }

  const std::string& name() const noexcept { return name_; }
  double norm_const() const noexcept { return norm_const_; }
  int catalog_index() const noexcept { return catalog_index_; }
  const std::optional<KernelIntegrals>& closed_form() const noexcept { return closed_; }

 private:
  std::string name_;
  Fn raw_;
  Fn raw_primitive_;
  double norm_const_;
  int catalog_index_;
  std::optional<KernelIntegrals> closed_;
};

namespace detail {

inline double norm_integral(const std::function<double(double)>& primitive) {
  return std::sqrt(2.0 * numerics::integrate([&](double s) {
                     const double r = primitive(s);
                     return r * r;
                   },
                                             0.0, 1.0, 1e-13));
}

}  // namespace detail

/// Largest |lambda(t) + lambda(2-t)| over a uniform grid of [0,1].
inline double antisymmetry_defect(const std::function<double(double)>& f, std::size_t points = 1000) {
  double worst = 0.0;
  for (std::size_t k = 0; k <= points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points);
    worst = std::max(worst, std::abs(f(t) + f(2.0 - t)));
  }
  return worst;
}

/// Divides an antisymmetric weight by the left-hand side of the normalization condition.
inline PreAverageFunction normalize(std::string name, PreAverageFunction::Fn raw,
                                    PreAverageFunction::Fn raw_primitive = {}) {
  if (antisymmetry_defect(raw) > 1e-9) throw InvalidInput("weight function is not antisymmetric");
  PreAverageFunction::Fn prim = raw_primitive;
  if (!prim) {
    prim = [raw](double u) {
      const double breaks[] = {1.0};
      return numerics::integrate_piecewise(raw, 0.0, u, breaks, 1e-12);
    };
  }
  const double nc = detail::norm_integral(prim);
  if (!(nc > 0.0) || !std::isfinite(nc)) throw DegenerateInput("weight function has zero norm");
  return PreAverageFunction(std::move(name), std::move(raw), nc, std::move(raw_primitive));
}

inline constexpr int kCatalogSize = 7;

/// The seven weight functions of the tuning table, 1-based.
inline PreAverageFunction catalog(int index) {
  using std::numbers::pi;
  using Fn = PreAverageFunction::Fn;
  Fn raw;
  Fn prim;
  double nc = 0.0;
  KernelIntegrals k{};
  std::string name;
  switch (index) {
    case 1:
      name = "(pi/2)cos(pi s/2)";
      raw = [](double s) { return std::cos(pi * s / 2.0); };
      prim = [](double u) { return 2.0 / pi * std::sin(pi * u / 2.0); };
      nc = 2.0 / pi;
      k = {1.0 / pi, pi / 4.0, pi * pi / 8.0};
      break;
    case 2:
      name = "(3pi/2)cos(3pi s/2)";
      raw = [](double s) { return std::cos(3.0 * pi * s / 2.0); };
      prim = [](double u) { return 2.0 / (3.0 * pi) * std::sin(3.0 * pi * u / 2.0); };
      nc = 2.0 / (3.0 * pi);
      k = {-1.0 / (3.0 * pi), -3.0 * pi / 4.0, 9.0 * pi * pi / 8.0};
      break;
    case 3:
      name = "sqrt(3/2)(1[0,1)-1(1,2])";
      raw = [](double s) { return s < 1.0 ? 1.0 : (s > 1.0 ? -1.0 : 0.0); };
      prim = [](double u) { return u <= 1.0 ? u : 2.0 - u; };
      nc = std::sqrt(6.0) / 3.0;
      k = {0.25, 1.5, 1.5};
      break;
    case 4:
      name = "(pi/sqrt3)sin(pi s)";
      raw = [](double s) { return std::sin(pi * s); };
      prim = [](double u) { return (1.0 - std::cos(pi * u)) / pi; };
      nc = std::sqrt(3.0) / pi;
      k = {1.0 / 6.0, pi * pi / 6.0, pi * pi / 6.0};
      break;
    case 5:
      name = "(2pi/sqrt3)sin(2pi s)";
      raw = [](double s) { return std::sin(2.0 * pi * s); };
      prim = [](double u) { return (1.0 - std::cos(2.0 * pi * u)) / (2.0 * pi); };
      nc = std::sqrt(3.0) / (2.0 * pi);
      k = {0.5, -2.0 * pi * pi / 3.0, 2.0 * pi * pi / 3.0};
      break;
    case 6:
      name = "(3sqrt5/2)(1-s)^3";
      raw = [](double s) { return std::pow(1.0 - s, 3); };
      prim = [](double u) { return (1.0 - std::pow(1.0 - u, 4)) / 4.0; };
      nc = 2.0 * std::sqrt(5.0) / 15.0;
      k = {379.0 / 896.0, 9.0 / 112.0, 45.0 / 28.0};
      break;
    case 7:
      name = "(sqrt91/2)(1-s)^5";
      raw = [](double s) { return std::pow(1.0 - s, 5); };
      prim = [](double u) { return (1.0 - std::pow(1.0 - u, 6)) / 6.0; };
      nc = 2.0 * std::sqrt(91.0) / 91.0;
      k = {8581.0 / 19008.0, 13.0 / 1584.0, 91.0 / 44.0};
      break;
    default:
      throw InvalidInput("pre-average catalog index must be in 1..7");
  }
  return PreAverageFunction(std::move(name), std::move(raw), nc, std::move(prim), index, k);
}

/// Block layout for pre-averaging n ticks with tuning constant c.
struct BlockGeometry {
  std::size_t n = 0;
  double c = 0.0;
  std::size_t block_len = 0;
  std::size_t m = 0;

  /// Ticks actually used; the trailing n - retained() ticks are dropped.
  std::size_t retained() const noexcept { return m * block_len; }
};

inline BlockGeometry block_geometry(std::size_t n, double c) {
  if (n < 16) throw InvalidInput("block_geometry: need at least 16 observations");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("block_geometry: c must be positive");
  const double len = std::floor(std::sqrt(static_cast<double>(n)) / c);
  if (len < 2.0) throw InvalidInput("block_geometry: c too large, block length below 2");
  BlockGeometry g;
  g.n = n;
  g.c = c;
  g.block_len = static_cast<std::size_t>(len);
  g.m = n / g.block_len;
  return g;
}

/// Geometry with a prescribed number of blocks m (block length floor(n/m)).
inline BlockGeometry geometry_from_blocks(std::size_t n, std::size_t m) {
  if (m < 2 || n / m < 2) throw InvalidInput("geometry_from_blocks: invalid block count");
  BlockGeometry g;
  g.n = n;
  g.block_len = n / m;
  g.m = m;
  g.c = static_cast<double>(m) / std::sqrt(static_cast<double>(n));
  return g;
}

/// Regression-type observations Z_i = m (Ybar_i^2 - b_i), i = 2..m, stored at index i-2.
struct PreAveragedSeries {
  std::vector<double> z;
  std::vector<double> grid;
  BlockGeometry geometry;
  std::vector<bool> rejected;

  std::size_t size() const noexcept { return z.size(); }
};

/// Per-window weighted averages Ybar_i and bias corrections b_i, i = 2..m.
struct BlockAverages {
  std::vector<double> ybar;
  std::vector<double> bias;
};

/// Ticks are Y_1..Y_n (values[j-1] = Y_j); window i covers j in [(i-2)L, iL] with L = block_len,
/// both endpoints included. The first window reaches Y_0, which is taken equal to Y_1.
inline BlockAverages block_averages(std::span<const double> y, const PreAverageFunction& lam,
                                    const BlockGeometry& geom) {
  if (y.size() < geom.retained()) throw InvalidInput("pre_average: fewer ticks than geometry needs");
  if (geom.m < 2) throw InvalidInput("pre_average: need at least two blocks");
  const std::size_t len = geom.block_len;
  const double m = static_cast<double>(geom.m);
  const double n = static_cast<double>(geom.retained());

  // exact antisymmetry w[2L-k] = -w[k], so a constant window averages to exactly zero
  std::vector<double> w(2 * len + 1);
  for (std::size_t k = 0; k < len; ++k) {
    w[k] = lam(static_cast<double>(k) / static_cast<double>(len));
    w[2 * len - k] = -w[k];
  }
  w[len] = 0.0;

  BlockAverages out;
  out.ybar.resize(geom.m - 1);
  out.bias.resize(geom.m - 1);
  const double avg_scale = m / n;
  const double bias_scale = m * m / (2.0 * n * n);
  for (std::size_t i = 2; i <= geom.m; ++i) {
    const std::size_t start = (i - 2) * len;
    auto at = [&](std::size_t j) { return y[j == 0 ? 0 : j - 1]; };
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) acc += w[k] * (at(start + k) - at(start + 2 * len - k));
    double b = 0.0;
    for (std::size_t k = 0; k <= 2 * len; ++k) {
      const std::size_t j = start + k;
      if (j >= 2) {
        const double d = y[j - 1] - y[j - 2];
        b += w[k] * w[k] * d * d;
      }
    }
    out.ybar[i - 2] = avg_scale * acc;
    out.bias[i - 2] = bias_scale * b;
  }
  return out;
}

inline std::vector<double> z_grid(const BlockGeometry& geom) {
  std::vector<double> g(geom.m - 1);
  for (std::size_t i = 2; i <= geom.m; ++i) g[i - 2] = static_cast<double>(i - 1) / static_cast<double>(geom.m);
  return g;
}

/// `bias_correction = false` drops b_i, giving Z_i = m Ybar_i^2.
inline PreAveragedSeries pre_average(const TickSeries& ticks, const PreAverageFunction& lam,
                                     const BlockGeometry& geom, bool bias_correction = true) {
  const auto parts = block_averages(ticks.view(), lam, geom);
  PreAveragedSeries out;
  out.geometry = geom;
  out.grid = z_grid(geom);
  out.z.resize(parts.ybar.size());
  const double m = static_cast<double>(geom.m);
  for (std::size_t p = 0; p < out.z.size(); ++p)
    out.z[p] = m * (parts.ybar[p] * parts.ybar[p] - (bias_correction ? parts.bias[p] : 0.0));
  out.rejected.assign(out.z.size(), false);
  return out;
}

/// Empirical scalar product (1/m) sum_i g((i-1)/m) Z_i.
template <class G>
double scalar_product(const PreAveragedSeries& zs, G&& g) {
  double s = 0.0;
  for (std::size_t p = 0; p < zs.z.size(); ++p) s += g(zs.grid[p]) * zs.z[p];
  return s / static_cast<double>(zs.geometry.m);
}

/// Integrated-volatility estimate sum_{i=2}^m (Ybar_i^2 - b_i).
inline double integrated_volatility(const PreAveragedSeries& zs) {
  return scalar_product(zs, [](double) { return 1.0; });
}

/// Rescaled quadratic variation (2n)^{-1} sum (Y_i - Y_{i-1})^2.
inline double noise_level(const TickSeries& ticks) {
  const auto n = ticks.size();
  if (n < 2) throw InvalidInput("noise_level: need at least two observations");
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = ticks.values[i] - ticks.values[i - 1];
    s += d * d;
  }
  return s / (2.0 * static_cast<double>(n));
}

}  // namespace asve
