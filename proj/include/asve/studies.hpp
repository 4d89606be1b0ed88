#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "asve/estimator.hpp"
#include "asve/numerics.hpp"
#include "asve/sim.hpp"
#include "asve/tuning.hpp"

namespace asve::studies {

/// Runs body(r) for r = 0..reps-1 on all hardware threads; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t reps, F&& body, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(reps, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (std::size_t r; (r = next++) < reps;) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next = reps;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
}

struct McStat {
  double mean = 0.0;
  double se = 0.0;
  double q95 = 0.0;
  std::size_t reps = 0;
};

inline McStat summarize(std::vector<double> v) {
  McStat s;
  s.reps = v.size();
  if (v.empty()) return s;
  s.mean = numerics::mean(v);
  s.se = v.size() > 1 ? numerics::sample_std(v) / std::sqrt(static_cast<double>(v.size())) : 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
  s.q95 = v[std::min(idx, v.size() - 1)];
  return s;
}

/// One Monte Carlo cell: simulated days of n ticks, ASVE with `cfg`, ISE against the true path.
struct Scenario {
  DaySpec day{};
  AsveConfig cfg{};
  std::size_t n = 15000;
};

/// Replication r uses seed derive_seed(seed, r), so cells sharing a seed share their paths.
inline McStat run_scenario(const Scenario& sc, std::size_t reps, std::uint64_t seed) {
  std::vector<double> ises(reps);
  const auto lam = catalog(sc.cfg.lam);
  parallel_for(reps, [&](std::size_t r) {
    const auto day = simulate_day(sc.day, sc.n, derive_seed(seed, r));
    const auto res = estimate(day.ticks, lam, sc.cfg);
    ises[r] = ise(res.curve.values, day.truth_on(res.curve.grid));
  });
  return summarize(std::move(ises));
}

inline constexpr double kTable2Noise[3] = {1.0 / 5000.0, 3.0 / 5000.0, 10.0 / 5000.0};
inline constexpr double kTable2Reference[3] = {1.41e-11, 2.39e-11, 5.05e-11};

struct Table2Row {
  double noise_std = 0.0;
  McStat gaussian;
  McStat uniform;
  double reference = 0.0;
};

/// Heston defaults with Gaussian and uniform noise at three levels. The jump filter is off:
/// the setting has no jumps.
inline std::vector<Table2Row> table2(std::size_t reps, std::uint64_t seed, std::size_t n = 15000) {
  std::vector<Table2Row> rows;
  for (std::size_t i = 0; i < 3; ++i) {
    Scenario sc;
    sc.n = n;
    sc.cfg.jump_filter = false;
    sc.day.noise.std = kTable2Noise[i];
    Table2Row row;
    row.noise_std = kTable2Noise[i];
    row.reference = kTable2Reference[i];
    sc.day.noise.kind = NoiseKind::Gaussian;
    row.gaussian = run_scenario(sc, reps, seed);
    sc.day.noise.kind = NoiseKind::Uniform;
    row.uniform = run_scenario(sc, reps, seed);
    rows.push_back(row);
  }
  return rows;
}

struct Table3Cell {
  std::string column;  // pure, rounded, jumps, jumps+rounded
  bool detection = false;
  McStat mise;
  double reference = 0.0;
};

inline constexpr double kTable3JumpIntensity = 1.0 / 3.0;
inline constexpr double kTable3JumpStd = 1e-3;

/// Robustness grid: {pure, rounded, jumps, jumps + rounded} x {without, with detection}.
inline std::vector<Table3Cell> table3(std::size_t reps, std::uint64_t seed, std::size_t n = 15000) {
  const char* names[4] = {"pure", "rounded", "jumps", "jumps+rounded"};
  const double ref_without[4] = {1.41e-11, 1.41e-11, 12.64e-11, 12.86e-11};
  const double ref_with[4] = {1.68e-11, 1.69e-11, 1.69e-11, 1.70e-11};
  std::vector<Table3Cell> cells;
  for (int det = 0; det < 2; ++det) {
    for (int col = 0; col < 4; ++col) {
      Scenario sc;
      sc.n = n;
      sc.day.noise.std = 1.0 / 5000.0;
      sc.day.rounding = col == 1 || col == 3;
      if (col >= 2) {
        sc.day.jumps.intensity = kTable3JumpIntensity;
        sc.day.jumps.size_std = kTable3JumpStd;
      }
      sc.cfg.jump_filter = det == 1;
      cells.push_back({names[col], det == 1, run_scenario(sc, reps, seed), det == 1 ? ref_with[col] : ref_without[col]});
    }
  }
  return cells;
}

/// Constant sigma = tau toy model: empirical sqrt(n)-scaled MSE of the integrated-volatility
/// estimator at c = c*.
struct MseConstantCheck {
  int lam = 0;
  double c = 0.0;
  double predicted = 0.0;
  McStat empirical;  // of n^{1/2} (IV_hat - sigma^2)^2
};

inline MseConstantCheck mse_constant_check(int lam_index, std::size_t n, std::size_t reps, std::uint64_t seed,
                              double sigma = 1.0, double tau = 1.0) {
  const auto lam = catalog(lam_index);
  const auto opt = optimal_c(lam, sigma / tau);
  MseConstantCheck out;
  out.lam = lam_index;
  out.c = opt.c_star();
  out.predicted = asymptotic_mse(lam, sigma, tau, out.c).total;
  const auto geom = block_geometry(n, out.c);
  std::vector<double> err(reps);
  parallel_for(reps, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> z(0.0, 1.0);
    TickSeries y;
    y.values.resize(n);
    const double step = sigma / std::sqrt(static_cast<double>(n));
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x += step * z(rng);
      y.values[i] = x + tau * z(rng);
    }
    const auto zs = pre_average(y, lam, geom);
    // windows i = 2..m carry full diffusion weight on (m-1)L ticks
    const double target =
        sigma * sigma * static_cast<double>((geom.m - 1) * geom.block_len) / static_cast<double>(n);
    const double e = integrated_volatility(zs) - target;
    err[r] = std::sqrt(static_cast<double>(n)) * e * e;
  });
  out.empirical = summarize(std::move(err));
  return out;
}

}  // namespace asve::studies
