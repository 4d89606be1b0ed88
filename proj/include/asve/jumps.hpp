#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "asve/error.hpp"
#include "asve/numerics.hpp"
#include "asve/preaverage.hpp"
#include "asve/types.hpp"

namespace asve {

/// Local pre-averages Q_r = (m1/n) sum_{|j-r| <= h} lambda(1 + (j-r) m1/n) Y_j on the
/// finer block scale m1 = floor(n^{3/4}), h = ceil(n/m1). values[k] belongs to r = first_r + k
/// (1-based tick index).
struct ScanStatistic {
  std::size_t m1 = 0;
  std::size_t half_width = 0;
  std::size_t first_r = 0;
  std::vector<double> values;

  std::size_t r_of(std::size_t k) const noexcept { return first_r + k; }
};

inline ScanStatistic scan_statistic(const TickSeries& ticks, const PreAverageFunction& lam) {
  const std::size_t n = ticks.size();
  if (n < 256) throw InvalidInput("scan_statistic: need at least 256 observations");
  ScanStatistic q;
  q.m1 = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.75)));
  const double ratio = static_cast<double>(q.m1) / static_cast<double>(n);
  q.half_width = (n + q.m1 - 1) / q.m1;
  q.first_r = q.half_width;
  const std::size_t h = q.half_width;
  std::vector<double> w(2 * h + 1);
  for (std::size_t k = 0; k <= 2 * h; ++k)
    w[k] = ratio * lam(1.0 + (static_cast<double>(k) - static_cast<double>(h)) * ratio);
  const std::size_t last_r = n - h;
  q.values.reserve(last_r - q.first_r + 1);
  const auto& y = ticks.values;
  for (std::size_t r = q.first_r; r <= last_r; ++r) {
    double acc = 0.0;
    // j = r - h + k, stored at y[j - 1]; r >= h so j >= 0 and j == 0 maps to Y_1
    for (std::size_t k = 0; k <= 2 * h; ++k) {
      const std::size_t j = r - h + k;
      acc += w[k] * y[j == 0 ? 0 : j - 1];
    }
    q.values.push_back(acc);
  }
  return q;
}

struct ScanTestOptions {
  double threshold = 2.81;
  bool two_sided = true;
};

/// Local t-test: consecutive blocks of ceil(sqrt(n)) statistics (a short trailing remainder
/// joins the last block), flag entries whose studentized value exceeds the threshold.
/// Returns indices into `q`. Blocks with zero spread are skipped.
inline std::vector<std::size_t> scan_test(std::span<const double> q, std::size_t n,
                                          const ScanTestOptions& opt = {}) {
  const auto block = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (q.size() < 2 * block) throw InvalidInput("scan_test: too few statistics for two blocks");
  std::vector<std::size_t> flags;
  const std::size_t nblocks = q.size() / block;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t start = b * block;
    const std::size_t end = (b + 1 == nblocks) ? q.size() : start + block;
    const auto part = q.subspan(start, end - start);
    const double mu = numerics::mean(part);
    const double sd = numerics::sample_std(part);
    if (!(sd > 0.0)) continue;
    for (std::size_t i = start; i < end; ++i) {
      const double t = (q[i] - mu) / sd;
      if ((opt.two_sided ? std::abs(t) : t) > opt.threshold) flags.push_back(i);
    }
  }
  return flags;
}

/// Flags 1-based tick indices i >= 2 whose squared increment exceeds 4 tau^2 log n.
inline std::vector<std::size_t> increment_test(const TickSeries& ticks, double tau_sq_hat) {
  const std::size_t n = ticks.size();
  if (n < 2) throw InvalidInput("increment_test: need at least two observations");
  const double bound = 4.0 * tau_sq_hat * std::log(static_cast<double>(n));
  std::vector<std::size_t> flags;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = ticks.values[i] - ticks.values[i - 1];
    if (d * d > bound) flags.push_back(i + 1);
  }
  return flags;
}

/// A merged run of flagged scan statistics, as a closed range of 1-based ticks it touches.
struct JumpEvent {
  std::size_t first_tick = 0;
  std::size_t last_tick = 0;
  double peak_statistic = 0.0;  // largest |studentized Q| is not kept; this is max |Q_r|
  std::size_t peak_r = 0;
};

struct JumpReport {
  std::vector<std::size_t> scan_flags;       // r values
  std::vector<std::size_t> increment_flags;  // tick indices i (increment Y_i - Y_{i-1})
  std::vector<JumpEvent> events;
  double threshold_t = 2.81;
  bool two_sided = true;
  std::size_t m1 = 0;
  std::size_t half_width = 0;
  double tau_sq_hat = 0.0;
  std::size_t n = 0;

  bool empty() const noexcept { return scan_flags.empty() && increment_flags.empty(); }
};

struct JumpConfig {
  double threshold = 2.81;
  bool two_sided = true;
  int scan_lambda = 3;
};

inline std::vector<JumpEvent> merge_scan_flags(const ScanStatistic& q, std::span<const std::size_t> flags_idx) {
  std::vector<JumpEvent> events;
  for (std::size_t a = 0; a < flags_idx.size();) {
    std::size_t b = a;
    while (b + 1 < flags_idx.size() && flags_idx[b + 1] == flags_idx[b] + 1) ++b;
    JumpEvent e;
    const std::size_t r0 = q.r_of(flags_idx[a]);
    const std::size_t r1 = q.r_of(flags_idx[b]);
    e.first_tick = r0 - q.half_width;
    e.last_tick = r1 + q.half_width;
    for (std::size_t i = a; i <= b; ++i) {
      const double v = std::abs(q.values[flags_idx[i]]);
      if (v >= e.peak_statistic) {
        e.peak_statistic = v;
        e.peak_r = q.r_of(flags_idx[i]);
      }
    }
    events.push_back(e);
    a = b + 1;
  }
  return events;
}

/// Runs both detection stages on the tick series.
inline JumpReport detect_jumps(const TickSeries& ticks, const JumpConfig& cfg = {}) {
  JumpReport rep;
  rep.threshold_t = cfg.threshold;
  rep.two_sided = cfg.two_sided;
  rep.n = ticks.size();
  rep.tau_sq_hat = noise_level(ticks);
  const auto lam = catalog(cfg.scan_lambda);
  const auto q = scan_statistic(ticks, lam);
  rep.m1 = q.m1;
  rep.half_width = q.half_width;
  const auto idx = scan_test(q.values, ticks.size(), {cfg.threshold, cfg.two_sided});
  rep.scan_flags.reserve(idx.size());
  for (auto k : idx) rep.scan_flags.push_back(q.r_of(k));
  rep.events = merge_scan_flags(q, idx);
  rep.increment_flags = increment_test(ticks, rep.tau_sq_hat);
  return rep;
}

/// Replaces every Z whose window [(i-2)L, iL] meets a scan event or a flagged increment by
/// the mean of its nearest accepted neighbours (one-sided at the ends).
inline PreAveragedSeries repair(PreAveragedSeries zs, const JumpReport& report) {
  const std::size_t L = zs.geometry.block_len;
  const std::size_t count = zs.z.size();
  if (zs.rejected.size() != count) zs.rejected.assign(count, false);
  auto mark = [&](std::size_t lo_tick, std::size_t hi_tick) {
    // window of Z_i (p = i-2) spans ticks [pL, (p+2)L]
    const std::size_t p_lo = lo_tick >= 2 * L ? (lo_tick - 2 * L + L - 1) / L : 0;
    for (std::size_t p = p_lo; p < count && p * L <= hi_tick; ++p)
      if ((p + 2) * L >= lo_tick) zs.rejected[p] = true;
  };
  for (const auto& e : report.events) mark(e.first_tick, e.last_tick);
  for (auto i : report.increment_flags) mark(i - 1, i);

  std::size_t accepted = 0;
  for (bool r : zs.rejected) accepted += r ? 0 : 1;
  if (accepted == 0) throw EstimationImpossible("all pre-averaged values rejected by jump filter");
  if (accepted == count) return zs;

  const std::vector<double> original = zs.z;
  std::vector<std::ptrdiff_t> left(count, -1);
  std::vector<std::ptrdiff_t> right(count, -1);
  std::ptrdiff_t last = -1;
  for (std::size_t p = 0; p < count; ++p) {
    left[p] = last;
    if (!zs.rejected[p]) last = static_cast<std::ptrdiff_t>(p);
  }
  last = -1;
  for (std::size_t p = count; p-- > 0;) {
    right[p] = last;
    if (!zs.rejected[p]) last = static_cast<std::ptrdiff_t>(p);
  }
  for (std::size_t p = 0; p < count; ++p) {
    if (!zs.rejected[p]) continue;
    const auto l = left[p];
    const auto r = right[p];
    if (l >= 0 && r >= 0)
      zs.z[p] = 0.5 * (original[static_cast<std::size_t>(l)] + original[static_cast<std::size_t>(r)]);
    else
      zs.z[p] = original[static_cast<std::size_t>(l >= 0 ? l : r)];
  }
  return zs;
}

}  // namespace asve
