#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "asve/error.hpp"
#include "asve/numerics.hpp"
#include "asve/preaverage.hpp"
#include "asve/wavelet.hpp"

namespace asve {

/// SURE of block James-Stein shrinkage for a block with squared norm `norm_sq`.
inline double sure_from_norm(double norm_sq, double lambda, std::size_t block_len) {
  const double L = static_cast<double>(block_len);
  if (norm_sq > lambda) return L + (lambda * lambda - 2.0 * lambda * (L - 2.0)) / norm_sq;
  return L + (norm_sq - 2.0 * L);
}

inline double sure_risk(std::span<const double> v, double lambda, std::size_t block_len) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return sure_from_norm(s, lambda, block_len);
}

/// Sparsity threshold gamma(u) = u^{-1/2} log2(u)^{3/2}.
inline double sparsity_threshold(double u) { return std::pow(std::log2(u), 1.5) / std::sqrt(u); }

enum class ShrinkMode { SparseUniversal, BlockJamesStein };

struct SureSelection {
  int level = 0;
  double lambda_star = 0.0;
  std::size_t L_star = 1;
  double T_j = 0.0;
  ShrinkMode mode = ShrinkMode::SparseUniversal;
  std::size_t d = 0;
};

/// Total SURE over the floor(d/L) full blocks of v.
inline double total_sure(std::span<const double> v, double lambda, std::size_t L) {
  const std::size_t blocks = v.size() / L;
  double s = 0.0;
  for (std::size_t q = 0; q < blocks; ++q) s += sure_risk(v.subspan(q * L, L), lambda, L);
  return s;
}

namespace detail {

struct LambdaChoice {
  double lambda;
  double risk;
};

/// Minimizes total SURE over lambda in [lo, hi] for fixed L. Between consecutive block
/// norms the total is a quadratic with vertex L-2 <= lo, so only lo, hi and the block
/// norms clipped into [lo, hi] can be minimizers.
inline LambdaChoice best_lambda(std::span<const double> v, std::size_t L, double lo, double hi) {
  const std::size_t blocks = v.size() / L;
  std::vector<double> norms(blocks);
  for (std::size_t q = 0; q < blocks; ++q) {
    double s = 0.0;
    for (std::size_t i = 0; i < L; ++i) s += v[q * L + i] * v[q * L + i];
    norms[q] = s;
  }
  std::sort(norms.begin(), norms.end());
  // suffix sums of 1/norm over blocks with norm > lambda; prefix sums of norm over the rest
  std::vector<double> inv_suffix(blocks + 1, 0.0);
  std::vector<double> prefix(blocks + 1, 0.0);
  for (std::size_t q = blocks; q-- > 0;)
    inv_suffix[q] = inv_suffix[q + 1] + (norms[q] > 0.0 ? 1.0 / norms[q] : 0.0);
  for (std::size_t q = 0; q < blocks; ++q) prefix[q + 1] = prefix[q] + norms[q];

  std::vector<double> candidates;
  candidates.reserve(blocks + 2);
  candidates.push_back(lo);
  candidates.push_back(hi);
  for (double s : norms) candidates.push_back(std::clamp(s, lo, hi));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const double Ld = static_cast<double>(L);
  LambdaChoice best{lo, std::numeric_limits<double>::infinity()};
  for (double lam : candidates) {
    // blocks [0, k) have norm <= lam
    const auto k = static_cast<std::size_t>(std::upper_bound(norms.begin(), norms.end(), lam) - norms.begin());
    const double above = static_cast<double>(blocks - k);
    const double risk = above * Ld + (lam * lam - 2.0 * lam * (Ld - 2.0)) * inv_suffix[k] + prefix[k] -
                        static_cast<double>(k) * Ld;
    if (risk < best.risk) best = {lam, risk};
  }
  return best;
}

}  // namespace detail

/// Levelwise choice between sparse universal shrinkage and block James-Stein with
/// SURE-optimal (lambda, L). Input coefficients are assumed to have unit noise variance.
/// Returns nullopt for an empty level.
inline std::optional<SureSelection> select_sure(std::span<const double> coeffs, int level = 0) {
  const std::size_t d = coeffs.size();
  if (d == 0) return std::nullopt;
  SureSelection sel;
  sel.level = level;
  sel.d = d;
  double t = 0.0;
  for (double x : coeffs) t += x * x - 1.0;
  sel.T_j = t / static_cast<double>(d);
  const double logd = std::log(static_cast<double>(d));
  if (sel.T_j <= sparsity_threshold(static_cast<double>(d))) {
    sel.mode = ShrinkMode::SparseUniversal;
    sel.lambda_star = 2.0 * logd;
    sel.L_star = 1;
    return sel;
  }
  sel.mode = ShrinkMode::BlockJamesStein;
  const auto max_L = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t L = 1; L <= std::max<std::size_t>(max_L, 1); ++L) {
    const double lo = std::max(static_cast<double>(L) - 2.0, 0.0);
    const double hi = 2.0 * static_cast<double>(L) * logd;
    const auto choice = detail::best_lambda(coeffs, L, lo, hi);
    if (choice.risk < best) {
      best = choice.risk;
      sel.lambda_star = choice.lambda;
      sel.L_star = L;
    }
  }
  return sel;
}

/// Applies the selected rule to a whole level; blocks are consecutive runs of L_star
/// coefficients starting at k = 0, the last one possibly shorter.
inline void shrink_level(std::span<double> coeffs, const SureSelection& sel) {
  if (sel.mode == ShrinkMode::SparseUniversal) {
    for (double& x : coeffs) {
      if (x == 0.0) continue;
      x *= std::max(0.0, 1.0 - sel.lambda_star / (x * x));
    }
    return;
  }
  const std::size_t L = sel.L_star;
  for (std::size_t start = 0; start < coeffs.size(); start += L) {
    const std::size_t end = std::min(start + L, coeffs.size());
    double s = 0.0;
    for (std::size_t i = start; i < end; ++i) s += coeffs[i] * coeffs[i];
    const double f = s > 0.0 ? std::max(0.0, 1.0 - sel.lambda_star / s) : 0.0;
    for (std::size_t i = start; i < end; ++i) coeffs[i] *= f;
  }
}

/// Term-by-term baselines.
inline double hard_threshold(double x, double t) { return std::abs(x) > t ? x : 0.0; }
inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Index interval [first, last) of Z values used to standardize detail (j,k), and the
/// resulting empirical standard deviation (divisor size-1), raised to `floor` if below it.
struct LocalStd {
  std::size_t first = 0;
  std::size_t last = 0;
  double s_hat = 0.0;
};

/// I_{j,k} is the support of psi_{j,k} for j <= j_interval, otherwise the support widened
/// symmetrically to 2^{J - j_interval} samples; the interval is clipped to the unpadded
/// series and shifted inward at the edges. A support lying in the padding is replaced by
/// the window of the same width ending at the last sample.
inline LocalStd local_std(std::span<const double> z, const WaveletCoefficients& layout, int j, std::size_t k,
                          int j_interval, double floor = 0.0) {
  if (j < layout.j0 || j >= layout.depth) throw InvalidInput("local_std: level out of range");
  const std::size_t n = z.size();
  auto [a, b] = layout.support(j, k);
  std::size_t width = b - a;
  if (j > j_interval) {
    const std::size_t target = std::size_t{1} << (layout.depth - std::max(j_interval, 0));
    const std::size_t grow = (target - width) / 2;
    a = a >= grow ? a - grow : 0;
    width = target;
    b = a + width;
  }
  if (a >= n) a = n > width ? n - width : 0;
  b = std::min(a + width, n);
  if (j > j_interval && b - a < width) a = b > width ? b - width : 0;
  while (b - a < 2 && (a > 0 || b < n)) {
    if (a > 0) --a;
    if (b < n) ++b;
  }
  LocalStd out{a, b, 0.0};
  out.s_hat = std::max(numerics::sample_std(z.subspan(a, b - a)), floor);
  return out;
}

}  // namespace asve
