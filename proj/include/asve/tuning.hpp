#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "asve/error.hpp"
#include "asve/numerics.hpp"
#include "asve/preaverage.hpp"
#include "asve/types.hpp"

namespace asve {

/// Leading-order MSE of the integrated-volatility estimator, scaled by sqrt(n).
struct MseBreakdown {
  double cov_term = 0.0;
  double var_term = 0.0;
  double total = 0.0;
};

struct TuningResult {
  int lam = 0;
  double c_star_over_snr = 0.0;
  double mse_const = 0.0;
  double snr_used = 1.0;

  double c_star() const noexcept { return c_star_over_snr * snr_used; }
};

/// Same integrals as KernelIntegrals, by adaptive quadrature regardless of closed forms.
inline KernelIntegrals kernel_integrals_numeric(const PreAverageFunction& lam, double tol = 1e-10) {
  KernelIntegrals k{};
  k.lag1_diffusion =
      numerics::integrate([&](double u) { return lam.antiderivative(u) * lam.antiderivative(1.0 - u); }, 0.0, 1.0, tol);
  const double mid[] = {0.5};
  k.lag1_noise = numerics::integrate_piecewise([&](double u) { return lam(u) * lam(1.0 - u); }, 0.0, 1.0, mid, tol);
  k.l2_norm_sq = numerics::integrate([&](double u) { return lam(u) * lam(u); }, 0.0, 1.0, tol);
  return k;
}

/// Closed forms for catalog members, quadrature otherwise.
inline KernelIntegrals kernel_integrals(const PreAverageFunction& lam) {
  if (lam.closed_form()) return *lam.closed_form();
  return kernel_integrals_numeric(lam, 1e-11);
}

inline MseBreakdown asymptotic_mse(const KernelIntegrals& k, double sigma, double tau, double c) {
  if (!(sigma > 0.0) || !(c > 0.0) || !(tau >= 0.0)) throw InvalidInput("asymptotic_mse: sigma, c must be positive");
  const double s2 = sigma * sigma;
  const double tc2 = (tau * c) * (tau * c);
  MseBreakdown out;
  const double cov = s2 * k.lag1_diffusion - tc2 * k.lag1_noise;
  out.cov_term = 4.0 / c * cov * cov;
  const double var = s2 + 2.0 * tc2 * k.l2_norm_sq;
  out.var_term = 2.0 / c * var * var;
  out.total = out.cov_term + out.var_term;
  return out;
}

inline MseBreakdown asymptotic_mse(const PreAverageFunction& lam, double sigma, double tau, double c) {
  const double breaks[] = {1.0};
  const double norm =
      numerics::integrate_piecewise([&](double u) { return lam.antiderivative(u) * lam.antiderivative(u); }, 0.0,
                                          2.0, breaks, 1e-10);
  if (std::abs(norm - 1.0) > 1e-6) throw InvalidInput("asymptotic_mse: weight function is not normalized");
  return asymptotic_mse(kernel_integrals(lam), sigma, tau, c);
}

/// Minimizes the asymptotic MSE over c with sigma = tau = 1; the optimum for a general
/// signal-to-noise ratio is c* = r* snr with r* depending only on lambda.
inline TuningResult optimal_c(const PreAverageFunction& lam, double snr = 1.0) {
  if (!(snr > 0.0)) throw InvalidInput("optimal_c: snr must be positive");
  const auto k = kernel_integrals(lam);
  auto f = [&](double r) { return asymptotic_mse(k, 1.0, 1.0, r).total; };
  double lo = 1e-3;
  double hi = 1e3;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double step = 1.05;
    std::vector<double> xs;
    for (double x = lo; x <= hi; x *= step) xs.push_back(x);
    std::size_t best = 0;
    double fbest = f(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double v = f(xs[i]);
      if (v < fbest) {
        fbest = v;
        best = i;
      }
    }
    if (best > 0 && best + 1 < xs.size()) {
      const auto m = numerics::golden_section(f, xs[best - 1], xs[best + 1], 1e-9);
      TuningResult out;
      out.lam = lam.catalog_index();
      out.c_star_over_snr = m.x;
      out.mse_const = m.fx;
      out.snr_used = snr;
      return out;
    }
    lo /= 1e3;
    hi *= 1e3;
  }
  throw EstimationImpossible("optimal_c: no interior minimum found");
}

struct SnrOptions {
  double floor = 0.1;
  // a pilot below this many null standard errors is treated as zero
  double significance = 2.0;
};

struct SnrEstimate {
  double snr = 0.0;
  double pilot = 0.0;
  double pilot_se = 0.0;
  double tau_sq = 0.0;
  bool floored = false;
};

/// Standard error of the pilot sum_i (Ybar_i^2 - b_i) when the data are pure i.i.d. noise of
/// variance tau_sq. Ybar has variance v0 and lag-one covariance v1 fixed by the weights, and
/// Cov(U^2, V^2) = 2 Cov(U, V)^2 for centered Gaussians.
inline double null_pilot_se(const PreAverageFunction& lam, const BlockGeometry& geom, double tau_sq) {
  const std::size_t L = geom.block_len;
  const double scale = static_cast<double>(geom.m) / static_cast<double>(geom.retained());
  double v0 = 0.0;
  double v1 = 0.0;
  for (std::size_t k = 0; k <= 2 * L; ++k) {
    const double w = lam(static_cast<double>(k) / static_cast<double>(L));
    v0 += w * w;
    if (k >= L) v1 += w * lam(static_cast<double>(k - L) / static_cast<double>(L));
  }
  v0 *= tau_sq * scale * scale;
  v1 *= tau_sq * scale * scale;
  const double terms = static_cast<double>(geom.m - 1);
  return std::sqrt(terms * 2.0 * v0 * v0 + 2.0 * (terms - 1.0) * 2.0 * v1 * v1);
}

/// Pilot integrated volatility on floor(sqrt(n)) blocks against the noise level.
inline SnrEstimate estimate_snr_detail(const TickSeries& ticks, const PreAverageFunction& lam,
                                       const SnrOptions& opt = {}) {
  const std::size_t n = ticks.size();
  if (n < 100) throw TooFewObservations("estimate_snr: need at least 100 observations");
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const auto geom = geometry_from_blocks(n, m);
  const auto zs = pre_average(ticks, lam, geom);
  SnrEstimate out;
  out.pilot = integrated_volatility(zs);
  out.tau_sq = noise_level(ticks);
  out.pilot_se = null_pilot_se(lam, geom, out.tau_sq);
  double snr = 0.0;
  if (out.tau_sq > 0.0) {
    if (out.pilot > opt.significance * out.pilot_se) snr = std::sqrt(out.pilot / out.tau_sq);
  } else if (out.pilot > 0.0) {
    snr = std::numeric_limits<double>::infinity();
  }
  out.floored = !(snr > opt.floor);
  out.snr = out.floored ? opt.floor : snr;
  return out;
}

inline double estimate_snr(const TickSeries& ticks, const PreAverageFunction& lam, const SnrOptions& opt = {}) {
  return estimate_snr_detail(ticks, lam, opt).snr;
}

/// Leading-order covariance of (Ybar_i, Ybar_{i+lag}) in the constant-parameter model.
inline double preav_covariance(const PreAverageFunction& lam, double sigma, double tau, double c, std::size_t n,
                               int lag) {
  const auto geom = block_geometry(n, c);
  const double m = static_cast<double>(geom.m);
  const double nn = static_cast<double>(n);
  const auto k = kernel_integrals(lam);
  const double s2 = sigma * sigma;
  const double t2 = tau * tau;
  if (lag == 0) return s2 / m + t2 * (m / nn) * 2.0 * k.l2_norm_sq;
  if (lag == 1 || lag == -1) return s2 / m * k.lag1_diffusion - t2 * (m / nn) * k.lag1_noise;
  return 0.0;
}

struct Table1Row {
  int index = 0;
  double c_star_over_snr = 0.0;
  double mse_const = 0.0;
  double ref_c = 0.0;
  double ref_mse = 0.0;
};

/// Reference constants, row i-1 for lambda_i.
inline constexpr std::array<std::array<double, 2>, 7> kTable1Reference{{
    {0.49, 10.21},
    {0.17, 31.36},
    {0.35, 10.74},
    {0.30, 12.52},
    {0.19, 24.35},
    {0.47, 20.41},
    {0.38, 20.36},
}};

inline std::vector<Table1Row> table1() {
  std::vector<Table1Row> rows;
  for (int i = 1; i <= kCatalogSize; ++i) {
    const auto r = optimal_c(catalog(i));
    const auto& ref = kTable1Reference[static_cast<std::size_t>(i - 1)];
    rows.push_back({i, r.c_star_over_snr, r.mse_const, ref[0], ref[1]});
  }
  return rows;
}

}  // namespace asve
