#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "asve/error.hpp"
#include "asve/estimator.hpp"
#include "asve/jumps.hpp"
#include "asve/preaverage.hpp"
#include "asve/tuning.hpp"
#include "asve/types.hpp"

namespace asve {

/// Two log-price series observed at the same instants.
struct PairedTicks {
  TickSeries y1;
  TickSeries y2;

  std::size_t size() const noexcept { return y1.size(); }

  void validate() const {
    if (y1.size() != y2.size()) throw InvalidInput("paired ticks: series differ in length");
  }
};

/// Z^kappa_i = m Ybar1_i Ybar2_i, i = 2..m. No bias term: the noises are independent.
inline PreAveragedSeries covol_values(const PairedTicks& pair, const PreAverageFunction& lam, const BlockGeometry& geom) {
  pair.validate();
  const auto a = block_averages(pair.y1.view(), lam, geom);
  const auto b = block_averages(pair.y2.view(), lam, geom);
  PreAveragedSeries out;
  out.geometry = geom;
  out.grid = z_grid(geom);
  out.z.resize(a.ybar.size());
  const double m = static_cast<double>(geom.m);
  for (std::size_t p = 0; p < out.z.size(); ++p) out.z[p] = m * (a.ybar[p] * b.ybar[p]);
  out.rejected.assign(out.z.size(), false);
  return out;
}

/// Both series' flags pooled into one report; the order of the inputs does not matter for repair.
inline JumpReport merge_reports(const JumpReport& a, const JumpReport& b) {
  JumpReport out = a;
  out.scan_flags.insert(out.scan_flags.end(), b.scan_flags.begin(), b.scan_flags.end());
  out.increment_flags.insert(out.increment_flags.end(), b.increment_flags.begin(), b.increment_flags.end());
  out.events.insert(out.events.end(), b.events.begin(), b.events.end());
  std::sort(out.scan_flags.begin(), out.scan_flags.end());
  out.scan_flags.erase(std::unique(out.scan_flags.begin(), out.scan_flags.end()), out.scan_flags.end());
  std::sort(out.increment_flags.begin(), out.increment_flags.end());
  out.increment_flags.erase(std::unique(out.increment_flags.begin(), out.increment_flags.end()),
                            out.increment_flags.end());
  std::sort(out.events.begin(), out.events.end(), [](const JumpEvent& x, const JumpEvent& y) {
    return x.first_tick != y.first_tick ? x.first_tick < y.first_tick : x.last_tick < y.last_tick;
  });
  out.events.erase(std::unique(out.events.begin(), out.events.end(),
                               [](const JumpEvent& x, const JumpEvent& y) {
                                 return x.first_tick == y.first_tick && x.last_tick == y.last_tick;
                               }),
                   out.events.end());
  out.tau_sq_hat = std::sqrt(a.tau_sq_hat * b.tau_sq_hat);
  return out;
}

/// Signal-to-noise ratio sqrt(|<kappa,1>| / (tau1 tau2)) from a pilot on floor(sqrt(n)) blocks.
inline SnrEstimate estimate_covol_snr(const PairedTicks& pair, const PreAverageFunction& lam,
                                      const SnrOptions& opt = {}) {
  pair.validate();
  const std::size_t n = pair.size();
  if (n < 100) throw TooFewObservations("estimate_covol_snr: need at least 100 observations");
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const auto geom = geometry_from_blocks(n, m);
  const auto zs = covol_values(pair, lam, geom);
  SnrEstimate out;
  out.pilot = integrated_volatility(zs);
  const double t1 = noise_level(pair.y1);
  const double t2 = noise_level(pair.y2);
  out.tau_sq = std::sqrt(t1 * t2);
  double snr = 0.0;
  if (out.tau_sq > 0.0) snr = std::sqrt(std::abs(out.pilot) / out.tau_sq);
  else if (out.pilot != 0.0) snr = std::numeric_limits<double>::infinity();
  out.floored = !(snr > opt.floor);
  out.snr = out.floored ? opt.floor : snr;
  return out;
}

/// Spot covolatility with the same tuning, jump handling and thresholding as `estimate`.
/// The curve may be negative.
inline AsveResult covol_estimate(const PairedTicks& pair, const PreAverageFunction& lam, const AsveConfig& cfg = {}) {
  pair.validate();
  const std::size_t n = pair.size();
  if (n < 16) throw TooFewObservations("covol_estimate: need at least 16 observations");
  AsveResult res;
  res.tau_sq = std::sqrt(noise_level(pair.y1) * noise_level(pair.y2));
  double c = 0.0;
  if (cfg.c) {
    c = *cfg.c;
    if (!(c > 0.0)) throw InvalidInput("covol_estimate: c must be positive");
  } else {
    const auto s = estimate_covol_snr(pair, lam, cfg.snr);
    res.snr = s.snr;
    res.snr_floored = s.floored;
    c = effective_c(n, cfg.c_factor * s.snr, cfg.min_block_len, cfg.min_blocks);
  }
  res.c = c;
  res.geometry = block_geometry(n, c);
  res.zs = covol_values(pair, lam, res.geometry);
  if (cfg.jump_filter) {
    res.jumps = merge_reports(detect_jumps(pair.y1, cfg.jumps), detect_jumps(pair.y2, cfg.jumps));
    res.zs = repair(std::move(res.zs), *res.jumps);
    res.rejected = static_cast<std::size_t>(std::count(res.zs.rejected.begin(), res.zs.rejected.end(), true));
  }
  res.threshold = threshold_series(res.zs.z, cfg.threshold);
  res.curve.grid = res.zs.grid;
  res.curve.values = res.threshold.values;
  return res;
}

inline AsveResult covol_estimate(const PairedTicks& pair, const AsveConfig& cfg = {}) {
  return covol_estimate(pair, catalog(cfg.lam), cfg);
}

}  // namespace asve
