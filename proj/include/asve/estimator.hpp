#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "asve/error.hpp"
#include "asve/jumps.hpp"
#include "asve/numerics.hpp"
#include "asve/preaverage.hpp"
#include "asve/threshold.hpp"
#include "asve/tuning.hpp"
#include "asve/types.hpp"
#include "asve/wavelet.hpp"

namespace asve {

/// Noise-scale estimate applied to all standardized details before SURE.
/// Mad is median|d|/0.6745 on the finest level; SampleStd is the root mean square there.
enum class GlobalRescale { None, Mad, SampleStd };

/// Options of the thresholding stage, shared by the univariate and bivariate estimators.
struct ThresholdConfig {
  int j0 = 2;
  std::optional<int> j_interval;  // default floor(log2((m-1)/16)) clamped to [j0, J-1]
  GlobalRescale rescale = GlobalRescale::SampleStd;
  double s_floor_ratio = 1e-3;
};

struct AsveConfig {
  int lam = 4;
  std::optional<double> c;  // fixed tuning constant; otherwise c_factor * SNR estimate
  double c_factor = 0.3;
  std::size_t min_block_len = 16;
  std::size_t min_blocks = 16;
  bool jump_filter = true;
  bool bias_correction = true;
  JumpConfig jumps{};
  SnrOptions snr{};
  ThresholdConfig threshold{};
};

struct ThresholdOutput {
  std::vector<double> values;
  std::vector<SureSelection> selections;
  int j0 = 0;
  int j_interval = 0;
  int depth = 0;
  double s_glob = 1.0;
  double s_floor = 0.0;
};

struct AsveResult {
  VolatilityCurve curve;
  PreAveragedSeries zs;
  BlockGeometry geometry;
  double c = 0.0;
  double snr = 0.0;
  bool snr_floored = false;
  double tau_sq = 0.0;
  std::optional<JumpReport> jumps;
  std::size_t rejected = 0;
  ThresholdOutput threshold;
};

inline int default_j_interval(std::size_t count, int j0, int depth) {
  const double q = static_cast<double>(count) / 16.0;
  const int j = q >= 1.0 ? static_cast<int>(std::floor(std::log2(q))) : 0;
  return std::clamp(j, j0, std::max(j0, depth - 1));
}

/// Wavelet thresholding of a regression-type series with heteroscedastic noise:
/// dwt, local standardization, global rescale, levelwise SURE selection and shrinkage,
/// inverse of the standardization, idwt.
inline ThresholdOutput threshold_series(std::span<const double> z, const ThresholdConfig& cfg = {}) {
  if (z.size() < 2) throw InvalidInput("threshold_series: need at least two values");
  auto coeffs = dwt(z, cfg.j0);
  ThresholdOutput out;
  out.j0 = coeffs.j0;
  out.depth = coeffs.depth;
  out.j_interval = cfg.j_interval ? std::clamp(*cfg.j_interval, coeffs.j0, std::max(coeffs.j0, coeffs.depth - 1))
                                  : default_j_interval(z.size(), coeffs.j0, coeffs.depth);
  if (coeffs.depth == coeffs.j0) {
    out.values = idwt(coeffs);
    return out;
  }

  // local standard deviations, then the floor relative to their median
  std::vector<std::vector<double>> s_hat(static_cast<std::size_t>(coeffs.num_levels()));
  std::vector<double> live_s;
  for (int j = coeffs.j0; j < coeffs.depth; ++j) {
    auto& s = s_hat[static_cast<std::size_t>(j - coeffs.j0)];
    s.resize(coeffs.level(j).size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = local_std(z, coeffs, j, k, out.j_interval).s_hat;
      if (!coeffs.padding_born(j, k)) live_s.push_back(s[k]);
    }
  }
  const double med = numerics::median(live_s);
  out.s_floor = cfg.s_floor_ratio * med;
  if (!(out.s_floor > 0.0)) {
    // locally constant everywhere: nothing to threshold against
    out.values = idwt(coeffs);
    return out;
  }
  for (auto& s : s_hat)
    for (double& v : s) v = std::max(v, out.s_floor);

  for (int j = coeffs.j0; j < coeffs.depth; ++j) {
    auto& d = coeffs.level(j);
    const auto& s = s_hat[static_cast<std::size_t>(j - coeffs.j0)];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] /= s[k];
  }
  if (cfg.rescale != GlobalRescale::None) {
    const int jf = coeffs.finest_level();
    const auto& fin = coeffs.level(jf);
    const std::span<const double> live(fin.data(), coeffs.live_count(jf));
    double g = 0.0;
    if (cfg.rescale == GlobalRescale::Mad) {
      g = numerics::mad_sigma(live);
    } else {
      for (double v : live) g += v * v;
      g = std::sqrt(g / static_cast<double>(live.size()));
    }
    out.s_glob = (g > 0.0 && std::isfinite(g)) ? g : 1.0;
  }
  for (int j = coeffs.j0; j < coeffs.depth; ++j) {
    auto& d = coeffs.level(j);
    for (double& v : d) v /= out.s_glob;
    const std::size_t live = coeffs.live_count(j);
    auto sel = select_sure(std::span<const double>(d.data(), live), j);
    if (!sel) continue;
    shrink_level(d, *sel);
    out.selections.push_back(*sel);
    const auto& s = s_hat[static_cast<std::size_t>(j - coeffs.j0)];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= out.s_glob * s[k];
  }
  out.values = idwt(coeffs);
  return out;
}

/// Tuning constant actually used: c_factor * snr clamped so that the block length is at
/// least min_block_len and at most n / min_blocks.
inline double effective_c(std::size_t n, double c, std::size_t min_block_len, std::size_t min_blocks) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double c_max = rn / static_cast<double>(std::max<std::size_t>(min_block_len, 2));
  // block_len = floor(rn / c) <= n / min_blocks
  const double c_min = rn / std::floor(static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(min_blocks, 2)));
  return std::clamp(c, std::min(c_min, c_max), c_max);
}

inline AsveResult estimate(const TickSeries& ticks, const PreAverageFunction& lam, const AsveConfig& cfg = {}) {
  const std::size_t n = ticks.size();
  if (n < 16) throw TooFewObservations("estimate: need at least 16 observations");
  for (double y : ticks.values)
    if (!std::isfinite(y)) throw InvalidInput("estimate: non-finite observation");
  AsveResult res;
  res.tau_sq = noise_level(ticks);
  double c = 0.0;
  if (cfg.c) {
    c = *cfg.c;
    if (!(c > 0.0)) throw InvalidInput("estimate: c must be positive");
  } else {
    const auto s = estimate_snr_detail(ticks, lam, cfg.snr);
    res.snr = s.snr;
    res.snr_floored = s.floored;
    c = effective_c(n, cfg.c_factor * s.snr, cfg.min_block_len, cfg.min_blocks);
  }
  res.c = c;
  res.geometry = block_geometry(n, c);
  res.zs = pre_average(ticks, lam, res.geometry, cfg.bias_correction);
  if (cfg.jump_filter) {
    res.jumps = detect_jumps(ticks, cfg.jumps);
    res.zs = repair(std::move(res.zs), *res.jumps);
    res.rejected = static_cast<std::size_t>(std::count(res.zs.rejected.begin(), res.zs.rejected.end(), true));
  }
  res.threshold = threshold_series(res.zs.z, cfg.threshold);
  res.curve.grid = res.zs.grid;
  res.curve.values = res.threshold.values;
  return res;
}

inline AsveResult estimate(const TickSeries& ticks, const AsveConfig& cfg = {}) { return estimate(ticks, catalog(cfg.lam), cfg); }

}  // namespace asve
