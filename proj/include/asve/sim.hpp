#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "asve/error.hpp"
#include "asve/types.hpp"

namespace asve {

/// splitmix64 finalizer; derive_seed(master, stream) gives the seed of replication/stream
/// `stream` under master seed `master`.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Streams used inside one simulated day.
enum class SeedStream : std::uint64_t { Path = 1, Noise = 2, Jumps = 3 };

inline std::uint64_t stream_seed(std::uint64_t seed, SeedStream s) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(s));
}

struct HestonParams {
  double rho = -2.0 / 3.0;
  double theta = 1e-5;
  double kappa = 4.0;
  double eps = std::sqrt(4.0 * 1e-5);
  double sigma0_sq = 1e-5;
  double x0 = 0.0;
  int oversample = 10;

  double feller_ratio() const { return 2.0 * kappa * theta / (eps * eps); }

  void validate() const {
    const double all[] = {rho, theta, kappa, eps, sigma0_sq, x0};
    for (double v : all)
      if (!std::isfinite(v)) throw InvalidInput("heston: non-finite parameter");
    if (std::abs(rho) > 1.0) throw InvalidInput("heston: |rho| > 1");
    if (!(theta > 0.0) || !(kappa > 0.0) || eps < 0.0 || !(sigma0_sq > 0.0))
      throw InvalidInput("heston: theta, kappa, sigma0_sq must be positive and eps non-negative");
    if (oversample < 1) throw InvalidInput("heston: oversampling factor must be at least 1");
  }
};

enum class NoiseKind { Gaussian, Uniform };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double std = 0.0;
  // optional state dependence tau(t, x); replaces `std` when set
  std::function<double(double, double)> tau;
};

struct JumpSpec {
  double intensity = 0.0;
  double size_std = 0.0;
};

struct JumpTime {
  double time = 0.0;
  double size = 0.0;
};

/// Latent path and variance on the observation grid.
struct LatentPath {
  std::vector<double> x;        // X_{i/n}, i = 1..n
  std::vector<double> sigma2;   // sigma^2_{i/n}, i = 0..n
  std::size_t clipped = 0;      // fine-grid steps where the variance proposal went negative
  std::size_t fine_steps = 0;
};

struct SimulatedDay {
  TickSeries ticks;
  std::vector<double> latent;
  std::vector<double> sigma2;  // at i/n, i = 0..n
  std::vector<JumpTime> jump_times;
  std::size_t clipped = 0;

  /// True variance sampled at round(t n) for each t of the grid.
  std::vector<double> truth_on(std::span<const double> grid) const {
    const std::size_t n = sigma2.size() - 1;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double pos = std::round(std::clamp(grid[i], 0.0, 1.0) * static_cast<double>(n));
      out[i] = sigma2[static_cast<std::size_t>(pos)];
    }
    return out;
  }
};

/// Full-truncation Euler scheme for the Heston model on a grid `oversample` times finer than 1/n.
inline LatentPath heston_path(const HestonParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n < 16) throw InvalidInput("simulate_heston: need n >= 16");
  std::mt19937_64 rng(stream_seed(seed, SeedStream::Path));
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto k = static_cast<std::size_t>(p.oversample);
  const double dt = 1.0 / (static_cast<double>(n) * static_cast<double>(k));
  const double sdt = std::sqrt(dt);
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  LatentPath out;
  out.x.reserve(n);
  out.sigma2.reserve(n + 1);
  double v = p.sigma0_sq;
  double x = p.x0;
  out.sigma2.push_back(v);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t s = 0; s < k; ++s) {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      const double dw = sdt * z1;
      const double dw_v = sdt * (p.rho * z1 + rho_c * z2);
      const double vp = std::max(v, 0.0);
      x += -0.5 * vp * dt + std::sqrt(vp) * dw;
      v += p.kappa * (p.theta - vp) * dt + p.eps * std::sqrt(vp) * dw_v;
      if (v < 0.0) ++out.clipped;
      ++out.fine_steps;
    }
    out.x.push_back(x);
    out.sigma2.push_back(std::max(v, 0.0));
  }
  return out;
}

/// Unit-variance noise variate from a uniform draw in (0,1). Gaussian and uniform kinds
/// share the same stream, so with a fixed seed they are comonotone.
inline double noise_quantile(NoiseKind kind, double u) {
  if (kind == NoiseKind::Uniform) return std::sqrt(3.0) * (2.0 * u - 1.0);
  return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
}

inline TickSeries add_noise(std::span<const double> x, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.std < 0.0 || !std::isfinite(spec.std)) throw InvalidInput("add_noise: std must be finite and non-negative");
  TickSeries out;
  out.values.assign(x.begin(), x.end());
  if (spec.std == 0.0 && !spec.tau) return out;
  std::mt19937_64 rng(stream_seed(seed, SeedStream::Noise));
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    // 53-bit uniform strictly inside (0,1)
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double tau = spec.tau ? spec.tau(static_cast<double>(i + 1) / n, x[i]) : spec.std;
    out.values[i] += tau * noise_quantile(spec.kind, u);
  }
  return out;
}

inline std::pair<TickSeries, std::vector<JumpTime>> add_jumps(TickSeries ticks, const JumpSpec& spec,
                                                              std::uint64_t seed) {
  if (spec.intensity < 0.0 || spec.size_std < 0.0) throw InvalidInput("add_jumps: negative parameter");
  std::vector<JumpTime> jumps;
  if (spec.intensity == 0.0 || ticks.empty()) return {std::move(ticks), jumps};
  std::mt19937_64 rng(stream_seed(seed, SeedStream::Jumps));
  std::exponential_distribution<double> wait(spec.intensity);
  std::normal_distribution<double> size(0.0, spec.size_std);
  for (double t = wait(rng); t <= 1.0; t += wait(rng)) jumps.push_back({t, size(rng)});
  const double n = static_cast<double>(ticks.size());
  for (const auto& j : jumps) {
    // observation i (1-based) sits at i/n; the jump affects every i/n >= t
    const auto first = static_cast<std::size_t>(std::ceil(j.time * n));
    for (std::size_t i = std::max<std::size_t>(first, 1); i <= ticks.size(); ++i) ticks.values[i - 1] += j.size;
  }
  return {std::move(ticks), jumps};
}

/// Rounds the price ref*exp(Y) to a multiple of tick_size and maps back to log scale.
inline TickSeries round_prices(TickSeries ticks, double ref_price, double tick_size) {
  if (!(ref_price > 0.0) || !(tick_size > 0.0)) throw InvalidInput("round_prices: ref and tick must be positive");
  for (double& y : ticks.values) y = std::log(std::round(ref_price * std::exp(y) / tick_size) * tick_size / ref_price);
  return ticks;
}

struct DaySpec {
  HestonParams heston{};
  NoiseSpec noise{};
  JumpSpec jumps{};
  bool rounding = false;
  double ref_price = 110.0;
  double tick_size = 0.01;
};

inline SimulatedDay simulate_heston(const HestonParams& params, std::size_t n, std::uint64_t seed) {
  auto path = heston_path(params, n, seed);
  SimulatedDay day;
  day.ticks.values = path.x;
  day.latent = std::move(path.x);
  day.sigma2 = std::move(path.sigma2);
  day.clipped = path.clipped;
  return day;
}

/// Heston path, then noise, jumps and rounding in that order.
inline SimulatedDay simulate_day(const DaySpec& spec, std::size_t n, std::uint64_t seed) {
  auto day = simulate_heston(spec.heston, n, seed);
  day.ticks = add_noise(day.latent, spec.noise, seed);
  auto [ticks, jumps] = add_jumps(std::move(day.ticks), spec.jumps, seed);
  day.ticks = std::move(ticks);
  day.jump_times = std::move(jumps);
  if (spec.rounding) day.ticks = round_prices(std::move(day.ticks), spec.ref_price, spec.tick_size);
  return day;
}

/// Integrated squared error by the midpoint rule: equal weights over the common grid.
inline double ise(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size() || estimate.empty()) throw InvalidInput("ise: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) s += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
  return s / static_cast<double>(estimate.size());
}

inline double integrated_square(std::span<const double> truth) {
  if (truth.empty()) throw InvalidInput("integrated_square: empty grid");
  double s = 0.0;
  for (double v : truth) s += v * v;
  return s / static_cast<double>(truth.size());
}

inline double mise(const std::vector<VolatilityCurve>& estimates, const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) throw InvalidInput("mise: list length mismatch");
  double s = 0.0;
  for (std::size_t r = 0; r < estimates.size(); ++r) s += ise(estimates[r].values, truths[r]);
  return s / static_cast<double>(estimates.size());
}

inline double rmise(const std::vector<VolatilityCurve>& estimates, const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) throw InvalidInput("rmise: list length mismatch");
  double s = 0.0;
  for (std::size_t r = 0; r < estimates.size(); ++r) s += ise(estimates[r].values, truths[r]) / integrated_square(truths[r]);
  return s / static_cast<double>(estimates.size());
}

}  // namespace asve
