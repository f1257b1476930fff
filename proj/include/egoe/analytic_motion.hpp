#pragma once

// Ensemble-averaged mode intensities S̄_n² in the dilute (fermion) and dense
// (boson) limits, and the level-motion variance built from them.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoe/combinatorics.hpp"
#include "egoe/errors.hpp"
#include "egoe/fock_space.hpp"
#include "egoe/qhermite.hpp"

namespace egoe {

/// S̄_n² = 2n C(m,k)^{2-n} C(N,k)^{-2}  (fermions, N -> ∞).
inline double sn2_fermion(int n, int m, int N, int k) {
  if (n < 1 || k < 1 || k > m || m > N) {
    throw DomainError("sn2_fermion: need n >= 1 and 1 <= k <= m <= N");
  }
  const double cmk = binomial_real(m, k);
  const double cnk = binomial_real(N, k);
  return 2.0 * n * std::pow(cmk, 2 - n) / (cnk * cnk);
}

/// S̄_n² = 2n C(N,k)^{-n}  (bosons, m -> ∞).
inline double sn2_boson(int n, int N, int k) {
  if (n < 1 || k < 1 || k > N) throw DomainError("sn2_boson: need n >= 1 and 1 <= k <= N");
  return 2.0 * n * std::pow(binomial_real(N, k), -n);
}

inline constexpr double kSeriesTolerance = 1e-16;

namespace detail {

inline void check_motion_args(Statistics s, int m, int N, int k, double q) {
  check_q(q, "motion_variance");
  if (k < 1 || k > m) throw DomainError("motion_variance: need 1 <= k <= m");
  if (s == Statistics::Fermion && m > N) throw DomainError("motion_variance: fermions need m <= N");
  if (s == Statistics::Boson && k > N) throw DomainError("motion_variance: bosons need k <= N");
}

/// d(N,m)² C(m,k)² C(N,k)^{-2}.
inline double motion_prefactor(Statistics s, int m, int N, int k) {
  const double d = static_cast<double>(dimension(s, N, m));
  const double ratio = binomial_real(m, k) / binomial_real(N, k);
  return d * d * ratio * ratio;
}

/// Per-mode weight without H²: ([n]_q!)^{-2} 2n C(m,k)^{2-n}  or  ([n]_q!)^{-2} 2n C(N,k)^{-n}.
inline double mode_weight(Statistics s, int n, int m, int N, int k, double q) {
  const double qf = qfactorial(n, q);
  const double base = s == Statistics::Fermion ? 2.0 * n * std::pow(binomial_real(m, k), 2 - n)
                                               : 2.0 * n * std::pow(binomial_real(N, k), -n);
  return base / (qf * qf);
}

inline double motion_variance(Statistics s, double e_hat, int m, int N, int k, double q, int n_max) {
  check_motion_args(s, m, N, k, q);
  if (n_max < 1) throw DomainError("motion_variance: n_max must be >= 1");
  const double rho = fqn_density(e_hat, q);
  if (rho == 0.0) return 0.0;
  double sum = 0.0;
  double prev_h = 0.0, cur_h = 1.0;  // H_{n-2}, H_{n-1}
  int small_terms = 0;
  for (int n = 1; n <= n_max; ++n) {
    const double term = mode_weight(s, n, m, N, k, q) * cur_h * cur_h;
    sum += term;
    // H_{n-1} may vanish at this point, but consecutive H's share no zeros:
    // stop after two consecutive negligible terms.
    small_terms = term <= kSeriesTolerance * sum ? small_terms + 1 : 0;
    if (small_terms >= 2) break;
    const double next_h = e_hat * cur_h - qnumber(n - 1, q) * prev_h;
    prev_h = cur_h;
    cur_h = next_h;
  }
  return motion_prefactor(s, m, N, k) * rho * rho * sum;
}

}  // namespace detail

/// Variance of the level motion for m fermions in N states with k-body
/// interactions, at normalized energy Ê, using n = 1..n_max modes.
inline double motion_variance_fermion(double e_hat, int m, int N, int k, double q, int n_max) {
  return detail::motion_variance(Statistics::Fermion, e_hat, m, N, k, q, n_max);
}

inline double motion_variance_boson(double e_hat, int m, int N, int k, double q, int n_max) {
  return detail::motion_variance(Statistics::Boson, e_hat, m, N, k, q, n_max);
}

/// Width of one excitation mode n over a grid of Ê, times a user scale (the
/// per-(n,q) normalization is not known in closed form; default 1).
struct ModeWidthCurve {
  Statistics statistics = Statistics::Fermion;
  int m = 0, N = 0, k = 0, n = 0;
  double q = 0.0;
  double scale = 1.0;
  std::vector<double> grid;
  std::vector<double> values;
};

inline ModeWidthCurve mode_width_curve(Statistics s, int m, int N, int k, double q, int n,
                                       std::span<const double> grid, double scale = 1.0) {
  detail::check_motion_args(s, m, N, k, q);
  if (n < 2) throw DomainError("mode_width_curve: mode index must be >= 2");
  if (grid.empty()) throw DomainError("mode_width_curve: empty grid");
  if (!(scale > 0.0)) throw DomainError("mode_width_curve: scale must be positive");
  ModeWidthCurve curve{s, m, N, k, n, q, scale, {grid.begin(), grid.end()}, {}};
  curve.values.reserve(grid.size());
  const double factor = scale * detail::motion_prefactor(s, m, N, k) * detail::mode_weight(s, n, m, N, k, q);
  for (double x : grid) {
    const double rho = fqn_density(x, q);
    const double h = hermite_q(n - 1, x, q);
    curve.values.push_back(factor * rho * rho * h * h);
  }
  return curve;
}

/// q values for the analytic-curve systems (m=10 fermions in N=20 states,
/// m=20 bosons in N=10 states), k = 2..5.
struct QPreset {
  Statistics statistics;
  int m, N, k;
  double q;
};

inline constexpr std::array<QPreset, 8> kModeCurvePresets{{
    {Statistics::Fermion, 10, 20, 2, 0.465},
    {Statistics::Fermion, 10, 20, 3, 0.176},
    {Statistics::Fermion, 10, 20, 4, 0.044},
    {Statistics::Fermion, 10, 20, 5, 0.007},
    {Statistics::Boson, 20, 10, 2, 0.932},
    {Statistics::Boson, 20, 10, 3, 0.84},
    {Statistics::Boson, 20, 10, 4, 0.712},
    {Statistics::Boson, 20, 10, 5, 0.556},
}};

inline std::optional<QPreset> find_preset(Statistics s, int k) {
  for (const auto& p : kModeCurvePresets) {
    if (p.statistics == s && p.k == k) return p;
  }
  return std::nullopt;
}

}  // namespace egoe
