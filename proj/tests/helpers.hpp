#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "asve/covol.hpp"
#include "asve/preaverage.hpp"
#include "asve/timescheme.hpp"
#include "asve/types.hpp"

namespace testing_util {

/// Brownian motion with constant sigma^2 on i/n plus i.i.d. Gaussian noise of std tau.
inline asve::TickSeries bm_with_noise(std::size_t n, double sigma2, double tau, std::uint64_t seed,
                                      std::vector<double>* latent = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double step = std::sqrt(sigma2 / static_cast<double>(n));
  asve::TickSeries y;
  y.values.resize(n);
  double x = 0.0;
  if (latent) latent->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x += step * z(rng);
    if (latent) (*latent)[i] = x;
    y.values[i] = x + tau * z(rng);
  }
  return y;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double stderr_of_mean(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// E[Z_i] for a driftless discretized Brownian motion with variance sigma2 and no noise, from the
/// weights: Ybar_i = (m/n) sum_l dX_l W_l with W_l the tail sums of the weights. Windows that do
/// not touch Y_0.
inline double exact_mean_z(const asve::PreAverageFunction& lam, const asve::BlockGeometry& g, double sigma2) {
  const std::size_t L = g.block_len;
  const double m = static_cast<double>(g.m);
  const double n = static_cast<double>(g.retained());
  std::vector<double> w(2 * L + 1);
  for (std::size_t k = 0; k <= 2 * L; ++k) w[k] = lam(static_cast<double>(k) / static_cast<double>(L));
  double tail = 0.0;
  for (double x : w) tail += x;
  // increments before the window carry the full weight sum, which vanishes by antisymmetry
  double var = 0.0;
  for (std::size_t k = 1; k <= 2 * L; ++k) {
    tail -= w[k - 1];
    var += tail * tail;
  }
  var *= (m / n) * (m / n) * sigma2 / n;
  double bias = 0.0;
  for (std::size_t k = 1; k <= 2 * L; ++k) bias += w[k] * w[k];
  bias *= m * m / (2.0 * n * n) * sigma2 / n;
  return m * (var - bias);
}

/// Deterministic time change h(u) = u + a sin(2 pi u) / (2 pi) with a = 1/2; tick i of n
/// trades at real time h(i/n).
struct TimeChange {
  double a = 0.5;

  double h(double u) const { return u + a * std::sin(2.0 * std::numbers::pi * u) / (2.0 * std::numbers::pi); }
  double h_prime(double u) const { return 1.0 + a * std::cos(2.0 * std::numbers::pi * u); }
  double h_inverse(double s) const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  /// Trading intensity at real time s.
  double nu(double s) const { return 1.0 / h_prime(h_inverse(s)); }

  /// Timestamps t_0..t_n on a session of `session` seconds; prices from `y` (t_0 carries the
  /// reference price).
  asve::RawTickData ticks(std::size_t n, const asve::TickSeries* y = nullptr, double session = 32400.0) const {
    asve::RawTickData raw;
    for (std::size_t i = 0; i <= n; ++i) {
      raw.times.push_back(session * h(static_cast<double>(i) / static_cast<double>(n)));
      raw.prices.push_back(y && i > 0 ? 110.0 * std::exp(y->values[i - 1]) : 110.0);
    }
    return raw;
  }
};

/// Correlated Brownian motions with equal sigma^2 and correlation rho, plus independent
/// Gaussian noises of std tau.
inline asve::PairedTicks correlated_pair(std::size_t n, double sigma2, double rho, double tau, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double step = std::sqrt(sigma2 / static_cast<double>(n));
  const double orth = std::sqrt(1.0 - rho * rho);
  asve::PairedTicks p;
  p.y1.values.resize(n);
  p.y2.values.resize(n);
  double x1 = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w1 = z(rng);
    const double w2 = rho * w1 + orth * z(rng);
    x1 += step * w1;
    x2 += step * w2;
    p.y1.values[i] = x1 + tau * z(rng);
    p.y2.values[i] = x2 + tau * z(rng);
  }
  return p;
}

inline double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace testing_util
