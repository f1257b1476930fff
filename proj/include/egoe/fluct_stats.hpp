#pragma once

// Unfolding with a fitted smooth model, nearest-neighbour spacing distribution
// and the Dyson-Mehta Δ3(L) statistic.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "egoe/decomposition.hpp"
#include "egoe/errors.hpp"
#include "egoe/fock_space.hpp"

namespace egoe {

inline constexpr double kDefaultTrim = 0.10;

struct UnfoldedSpectrum {
  std::vector<double> levels;  ///< strictly increasing, unit mean spacing
  double trim = kDefaultTrim;
  std::size_t first_index = 0;     ///< index of levels[0] in the original spectrum
  double raw_mean_spacing = 1.0;   ///< mean spacing of F̄(E_i) before rescaling

  std::size_t size() const { return levels.size(); }
};

/// Levels dropped from each end of a spectrum of size d.
inline std::size_t trim_count(std::size_t d, double trim) {
  return static_cast<std::size_t>(std::floor(0.5 * trim * static_cast<double>(d)));
}

/// Smooth-model order used for unfolding: fermions n0 = 4 for k <= 4, bosons
/// n0 = 6 for k <= 7, otherwise the bare q-normal (n0 = 2).
inline int unfolding_order(Statistics s, int k) {
  if (s == Statistics::Fermion) return k <= 4 ? 4 : 2;
  return k <= 7 ? 6 : 2;
}

/// Rescales already-mapped levels (central window) to unit mean spacing.
inline UnfoldedSpectrum unfold_mapped(std::span<const double> mapped, double trim) {
  if (!(trim >= 0.0 && trim < 1.0)) throw DomainError("unfold: trim must lie in [0, 1)");
  const std::size_t cut = trim_count(mapped.size(), trim);
  if (mapped.size() < 2 * cut + 2) throw DomainError("unfold: too few levels after trimming");
  const std::size_t first = cut, last = mapped.size() - cut;  // [first, last)
  for (std::size_t i = first + 1; i < last; ++i) {
    if (!(mapped[i] > mapped[i - 1])) {
      throw UnfoldingError("unfold: smooth distribution function not increasing between levels " +
                           std::to_string(i - 1) + " and " + std::to_string(i) + " (F̄ = " +
                           std::to_string(mapped[i - 1]) + ", " + std::to_string(mapped[i]) + ")");
    }
  }
  UnfoldedSpectrum out;
  out.trim = trim;
  out.first_index = first;
  out.raw_mean_spacing = (mapped[last - 1] - mapped[first]) / static_cast<double>(last - first - 1);
  out.levels.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) out.levels.push_back(mapped[i] / out.raw_mean_spacing);
  return out;
}

/// ê_i = F̄(E_i) on the central (1 - trim) fraction, rescaled to unit mean spacing.
inline UnfoldedSpectrum unfold(const Spectrum& s, const SmoothModel& model, double trim = kDefaultTrim) {
  const auto mapped = smooth_F(model, std::span<const double>(s.levels));
  return unfold_mapped(mapped, trim);
}

inline double wigner_surmise(double s) {
  return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
}
inline double wigner_cdf(double s) { return 1.0 - std::exp(-0.25 * std::numbers::pi * s * s); }
inline double poisson_spacing(double s) { return std::exp(-s); }
inline double poisson_cdf(double s) { return 1.0 - std::exp(-s); }

struct SpacingHistogram {
  std::vector<double> edges;       ///< bins+1 edges
  std::vector<double> density;     ///< normalized counts per unit s
  std::vector<double> wigner;      ///< bin-averaged Wigner surmise
  std::vector<double> poisson;     ///< bin-averaged exp(-s)
  double variance = 0.0;           ///< σ²(0) of the pooled spacings
  double mean = 0.0;
  std::size_t count = 0;
  double l1_wigner = 0.0;          ///< Σ |density - wigner| Δs
  double l1_poisson = 0.0;
};

inline SpacingHistogram nnsd(std::span<const UnfoldedSpectrum> ensemble, double bin_width = 0.1,
                             double s_max = 4.0) {
  if (ensemble.empty()) throw DomainError("nnsd: empty ensemble");
  if (!(bin_width > 0.0) || !(s_max > bin_width)) throw DomainError("nnsd: bad binning");
  std::vector<double> spacings;
  for (const auto& u : ensemble) {
    for (std::size_t i = 1; i < u.levels.size(); ++i) spacings.push_back(u.levels[i] - u.levels[i - 1]);
  }
  if (spacings.empty()) throw DomainError("nnsd: no spacings");

  const auto bins = static_cast<std::size_t>(std::llround(s_max / bin_width));
  SpacingHistogram h;
  h.count = spacings.size();
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = bin_width * static_cast<double>(b);
  std::vector<double> counts(bins, 0.0);
  double sum = 0.0;
  for (double s : spacings) {
    sum += s;
    if (s >= 0.0 && s < h.edges[bins]) {
      counts[std::min(bins - 1, static_cast<std::size_t>(s / bin_width))] += 1.0;
    }
  }
  h.mean = sum / static_cast<double>(h.count);
  double var = 0.0;
  for (double s : spacings) var += (s - h.mean) * (s - h.mean);
  h.variance = var / static_cast<double>(h.count);

  h.density.resize(bins);
  h.wigner.resize(bins);
  h.poisson.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = h.edges[b], hi = h.edges[b + 1], w = hi - lo;
    h.density[b] = counts[b] / (static_cast<double>(h.count) * w);
    h.wigner[b] = (wigner_cdf(hi) - wigner_cdf(lo)) / w;
    h.poisson[b] = (poisson_cdf(hi) - poisson_cdf(lo)) / w;
    h.l1_wigner += std::abs(h.density[b] - h.wigner[b]) * w;
    h.l1_poisson += std::abs(h.density[b] - h.poisson[b]) * w;
  }
  return h;
}

/// Least-squares deviation of the staircase from the best straight line over
/// [start, start + L], closed form for a step function. With ε_j the levels in
/// the window measured from its midpoint (j = 1..n ascending):
///   Δ3 = n²/16 - (Σε)²/L² + 3n Σε²/(2L²) - 3(Σε²)²/L⁴ + Σ(n - 2j + 1) ε_j / L.
inline double delta3_window(std::span<const double> levels, double start, double length) {
  if (!(length > 0.0)) throw DomainError("delta3_window: length must be positive");
  const auto lo = std::lower_bound(levels.begin(), levels.end(), start);
  const auto hi = std::upper_bound(lo, levels.end(), start + length);
  const double mid = start + 0.5 * length;
  const double n = static_cast<double>(hi - lo);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double j = 1.0;
  for (auto it = lo; it != hi; ++it, j += 1.0) {
    const double e = *it - mid;
    s1 += e;
    s2 += e * e;
    s3 += (n - 2.0 * j + 1.0) * e;
  }
  const double l2 = length * length;
  return n * n / 16.0 - s1 * s1 / l2 + 1.5 * n * s2 / l2 - 3.0 * s2 * s2 / (l2 * l2) + s3 / length;
}

/// Δ3(L) of one unfolded spectrum: mean over windows starting at the first
/// level and advanced by `shift`; windows running past the last level are dropped.
inline double delta3_spectrum(std::span<const double> levels, double length, double shift = 2.0) {
  if (levels.size() < 2) throw DomainError("delta3: need at least 2 levels");
  if (!(shift > 0.0)) throw DomainError("delta3: window shift must be positive");
  const double first = levels.front(), last = levels.back();
  if (first + length > last) {
    throw DomainError("delta3: L = " + std::to_string(length) + " exceeds the spectrum span " +
                      std::to_string(last - first));
  }
  double sum = 0.0;
  std::size_t windows = 0;
  for (double x = first; x + length <= last; x += shift) {
    sum += delta3_window(levels, x, length);
    ++windows;
  }
  return sum / static_cast<double>(windows);
}

inline double delta3_poisson(double L) { return L / 15.0; }

/// Large-L GOE form (1/π²)[ln(2πL) + γ - 5/4 - π²/8].
inline double delta3_goe(double L) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return (std::log(2.0 * std::numbers::pi * L) + std::numbers::egamma - 1.25 - pi2 / 8.0) / pi2;
}

struct Delta3Curve {
  std::vector<double> L;
  std::vector<double> delta3;   ///< ensemble mean
  std::vector<double> goe;
  std::vector<double> poisson;
};

inline Delta3Curve delta3(std::span<const UnfoldedSpectrum> ensemble, double L_max = 60.0,
                          double L_step = 2.0, double shift = 2.0) {
  if (ensemble.empty()) throw DomainError("delta3: empty ensemble");
  if (!(L_step > 0.0) || L_max < L_step) throw DomainError("delta3: bad L grid");
  Delta3Curve c;
  for (double L = L_step; L <= L_max + 1e-9; L += L_step) {
    double sum = 0.0;
    for (const auto& u : ensemble) sum += delta3_spectrum(u.levels, L, shift);
    c.L.push_back(L);
    c.delta3.push_back(sum / static_cast<double>(ensemble.size()));
    c.goe.push_back(delta3_goe(L));
    c.poisson.push_back(delta3_poisson(L));
  }
  return c;
}

}  // namespace egoe
