#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "asve/jumps.hpp"
#include "asve/sim.hpp"
#include "helpers.hpp"

using namespace asve;

TEST(ScanStatistic, ConstantSeriesGivesZero) {
  TickSeries y;
  y.values.assign(4000, 1.25);
  const auto q = scan_statistic(y, catalog(3));
  EXPECT_EQ(q.m1, static_cast<std::size_t>(std::floor(std::pow(4000.0, 0.75))));
  for (double v : q.values) EXPECT_NEAR(v, 0.0, 1e-12);
  TickSeries small;
  small.values.assign(255, 0.0);
  EXPECT_THROW(scan_statistic(small, catalog(3)), InvalidInput);
}

TEST(ScanStatistic, SingleJumpResponseMatchesDirectSum) {
  const std::size_t n = 10000;
  const std::size_t r0 = 4000;
  const double delta = 0.01;
  TickSeries y;
  y.values.assign(n, 0.0);
  for (std::size_t j = r0; j <= n; ++j) y.values[j - 1] = delta;
  const auto lam = catalog(3);
  const auto q = scan_statistic(y, lam);
  // direct evaluation of sum_{j >= r0, |j - r0| <= h} (m1/n) lambda(1 + (j - r0) m1/n) * delta
  const double ratio = static_cast<double>(q.m1) / static_cast<double>(n);
  double direct = 0.0;
  for (std::size_t j = r0; j <= r0 + q.half_width; ++j) direct += ratio * lam(1.0 + static_cast<double>(j - r0) * ratio) * delta;
  double peak = 0.0;
  for (double v : q.values) peak = std::max(peak, std::abs(v));
  const double at_r0 = q.values[r0 - q.first_r];
  EXPECT_NEAR(std::abs(at_r0), std::abs(direct), 0.1 * std::abs(direct));
  EXPECT_NEAR(peak, std::abs(direct), 0.1 * std::abs(direct));
}

TEST(ScanStatistic, PureNoiseSpread) {
  const std::size_t n = 15000;
  const double tau = 1.0 / 5000.0;
  const auto lam = catalog(3);
  std::vector<double> at_point;
  std::size_t m1 = 0;
  for (int r = 0; r < 1000; ++r) {
    const auto y = testing_util::bm_with_noise(n, 0.0, tau, 1000 + r);
    const auto q = scan_statistic(y, lam);
    m1 = q.m1;
    at_point.push_back(q.values[q.values.size() / 2]);
  }
  // ||lambda||_{L2[0,2]}^2 = 3 for lambda3
  const double expected = tau * std::sqrt(static_cast<double>(m1) / static_cast<double>(n)) * std::sqrt(3.0);
  EXPECT_NEAR(std::sqrt(numerics::sample_variance(at_point)), expected, 0.1 * expected);
}

TEST(ScanTest, GaussianFlagRate) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> q(100000);
  for (double& x : q) x = z(rng);
  const auto one = scan_test(q, 15000, {2.81, false});
  const double rate = static_cast<double>(one.size()) / static_cast<double>(q.size());
  EXPECT_GT(rate, 0.0025 / 2.0);
  EXPECT_LT(rate, 0.0025 * 2.0);
  const auto two = scan_test(q, 15000, {2.81, true});
  EXPECT_GT(two.size(), one.size());
}

TEST(ScanTest, ConstantStatisticsGiveNoFlags) {
  const std::vector<double> q(1000, 3.0);
  EXPECT_TRUE(scan_test(q, 15000).empty());
  const std::vector<double> few(100, 0.0);
  EXPECT_THROW(scan_test(few, 15000), InvalidInput);
}

TEST(ScanTest, PowerAgainstSingleJumpInHestonDay) {
  const std::size_t n = 15000;
  const int reps = 500;
  int hits = 0;
  std::mt19937_64 size_rng(77);
  std::normal_distribution<double> size(0.0, 1e-3);
  for (int r = 0; r < reps; ++r) {
    DaySpec spec;
    spec.noise.std = 1.0 / 5000.0;
    auto day = simulate_day(spec, n, derive_seed(5, static_cast<std::uint64_t>(r)));
    const double dj = size(size_rng);
    const std::size_t r0 = static_cast<std::size_t>(std::ceil(0.4 * n));
    for (std::size_t i = r0; i <= n; ++i) day.ticks.values[i - 1] += dj;
    const auto rep = detect_jumps(day.ticks);
    bool hit = false;
    for (const auto& e : rep.events) hit = hit || (e.first_tick <= r0 && r0 <= e.last_tick);
    hits += hit ? 1 : 0;
  }
  EXPECT_GE(hits, static_cast<int>(0.8 * reps));
}

TEST(IncrementTest, ThresholdArithmetic) {
  const std::size_t n = 15000;
  TickSeries y;
  y.values.assign(n, 0.0);
  const double tau_sq = 1e-8;
  y.values[7000] = 10.0 * std::sqrt(tau_sq);
  const auto flags = increment_test(y, tau_sq);
  ASSERT_EQ(flags.size(), 2u);  // the rise at i = 7001 and the fall at i = 7002
  EXPECT_EQ(flags[0], 7001u);
  TickSeries flat;
  flat.values.assign(100, 3.0);
  EXPECT_TRUE(increment_test(flat, 0.0).empty());
}

TEST(IncrementTest, FewFalseFlagsOnPureNoise) {
  std::size_t total = 0;
  for (int r = 0; r < 500; ++r) {
    const auto y = testing_util::bm_with_noise(15000, 0.0, 1.0 / 5000.0, 3000 + r);
    total += increment_test(y, noise_level(y)).size();
  }
  EXPECT_LT(static_cast<double>(total) / 500.0, 1.0);
}

namespace {

PreAveragedSeries series_of(std::vector<double> z, std::size_t block_len) {
  PreAveragedSeries zs;
  zs.geometry.block_len = block_len;
  zs.geometry.m = z.size() + 1;
  zs.geometry.n = zs.geometry.m * block_len;
  zs.z = std::move(z);
  zs.grid = z_grid(zs.geometry);
  zs.rejected.assign(zs.z.size(), false);
  return zs;
}

}  // namespace

TEST(Repair, NoFlagsIsIdentity) {
  const auto zs = series_of({1, 2, 3, 4, 5}, 10);
  const auto out = repair(zs, JumpReport{});
  EXPECT_EQ(out.z, zs.z);
}

TEST(Repair, InteriorValueReplacedByNeighbourMean) {
  // window of index p spans ticks [10p, 10p + 20]; an increment at tick 25 (pair 24,25)
  // lies only in windows p = 1 (ticks 10..30) and p = 2 (20..40)
  auto zs = series_of({1, 4, 100, 200, 6, 7}, 10);
  JumpReport rep;
  rep.increment_flags = {25};
  const auto out = repair(zs, rep);
  EXPECT_TRUE(out.rejected[1]);
  EXPECT_TRUE(out.rejected[2]);
  EXPECT_FALSE(out.rejected[3]);
  EXPECT_EQ(out.z[1], 0.5 * (1 + 200));
  // a single rejected value between 4 and 6
  auto zs2 = series_of({4, 999, 6, 1, 1, 1, 1}, 10);
  JumpReport rep2;
  JumpEvent e;
  e.first_tick = 30;
  e.last_tick = 30;
  rep2.events.push_back(e);
  auto out2 = repair(zs2, rep2);
  // tick 30 lies in windows p = 1 (10..30), 2 (20..40), 3 (30..50)
  EXPECT_TRUE(out2.rejected[1]);
  EXPECT_TRUE(out2.rejected[3]);
  EXPECT_EQ(out2.z[0], 4.0);
  EXPECT_EQ(out2.z[4], 1.0);
}

TEST(Repair, SingleRejectionUsesNearestNeighbours) {
  // interior windows overlap by L ticks, so a single rejection can only come from a prior flag
  auto zs = series_of({1, 4, 999, 6, 1}, 10);
  zs.rejected[2] = true;
  const auto out = repair(zs, JumpReport{});
  EXPECT_FALSE(out.rejected[1]);
  EXPECT_TRUE(out.rejected[2]);
  EXPECT_FALSE(out.rejected[3]);
  EXPECT_EQ(out.z[2], 5.0);
  // tick 35 meets windows p = 2 (20..40) and p = 3 (30..50)
  JumpReport rep;
  JumpEvent e;
  e.first_tick = 35;
  e.last_tick = 35;
  rep.events.push_back(e);
  const auto out2 = repair(series_of({1, 4, 999, 6, 1}, 10), rep);
  EXPECT_EQ(out2.rejected, (std::vector<bool>{false, false, true, true, false}));
  EXPECT_EQ(out2.z[2], 2.5);
  EXPECT_EQ(out2.z[3], 2.5);
}

TEST(Repair, OneSidedAtBoundary) {
  // tick 31 lies only in the last window p = 2 (ticks 20..40)
  auto zs = series_of({4, 7, 999}, 10);
  JumpReport rep;
  JumpEvent e;
  e.first_tick = 31;
  e.last_tick = 31;
  rep.events.push_back(e);
  const auto out = repair(zs, rep);
  EXPECT_FALSE(out.rejected[1]);
  EXPECT_TRUE(out.rejected[2]);
  EXPECT_EQ(out.z[2], 7.0);
}

TEST(Repair, AcceptedValuesAreBitIdentical) {
  const auto y = testing_util::bm_with_noise(15000, 1e-5, 2e-4, 9);
  TickSeries jumped = y;
  for (std::size_t i = 9000; i < 15000; ++i) jumped.values[i] += 5e-3;
  const auto zs = pre_average(jumped, catalog(4), block_geometry(15000, 4.0));
  const auto rep = detect_jumps(jumped);
  ASSERT_FALSE(rep.empty());
  const auto out = repair(zs, rep);
  std::size_t rejected = 0;
  for (std::size_t p = 0; p < zs.z.size(); ++p) {
    if (out.rejected[p]) ++rejected;
    else EXPECT_EQ(out.z[p], zs.z[p]);
  }
  EXPECT_GT(rejected, 0u);
}

TEST(Repair, EverythingRejectedThrows) {
  auto zs = series_of({1, 2, 3}, 10);
  JumpReport rep;
  JumpEvent e;
  e.first_tick = 0;
  e.last_tick = 1000;
  rep.events.push_back(e);
  EXPECT_THROW(repair(zs, rep), EstimationImpossible);
}

TEST(DetectJumps, TranslationInvariant) {
  const auto y = testing_util::bm_with_noise(15000, 1e-5, 2e-4, 10);
  TickSeries shifted = y;
  for (double& v : shifted.values) v += 0.125;
  const auto a = detect_jumps(y);
  const auto b = detect_jumps(shifted);
  EXPECT_EQ(a.scan_flags, b.scan_flags);
  EXPECT_EQ(a.increment_flags, b.increment_flags);
}
