#pragma once

// Ensemble-level drivers shared by the command-line tool and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "egoe/decomposition.hpp"
#include "egoe/ensemble.hpp"
#include "egoe/fluct_stats.hpp"
#include "egoe/parallel.hpp"
#include "egoe/periodogram.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

/// Samples, embeds and diagonalizes every member. Output order is member order
/// regardless of the thread count.
inline std::vector<Spectrum> generate_spectra(const EnsembleSpec& spec, unsigned threads = 1) {
  spec.validate();
  const Embedder embedder(spec);
  std::vector<Spectrum> spectra(static_cast<std::size_t>(spec.members));
  parallel_for(spectra.size(), threads, [&](std::size_t i) {
    const auto member = static_cast<int>(i);
    spectra[i] = eigenvalues(embed(sample_kbody(spec, member), embedder, spec));
  });
  return spectra;
}

/// Per-member decomposition at several orders, q taken from the member's own
/// fourth moment.
struct MemberDecomposition {
  SpectralMoments moments;
  std::vector<SmoothModel> models;       ///< one per requested order
  std::vector<LevelMotionSeries> series; ///< one per requested order
};

inline MemberDecomposition decompose_member(const Spectrum& s, std::span<const int> orders) {
  if (orders.empty()) throw DomainError("decompose_member: no orders requested");
  MemberDecomposition out;
  out.moments = moments(s);
  const int max_order = *std::max_element(orders.begin(), orders.end());
  const ModeDecomposition dec(s, out.moments.q_est, max_order, out.moments.centroid, out.moments.width());
  for (int order : orders) {
    out.models.push_back(dec.fit(order));
    out.series.push_back(dec.level_motion(out.models.back()));
  }
  return out;
}

inline std::vector<MemberDecomposition> decompose_ensemble(std::span<const Spectrum> spectra,
                                                           std::span<const int> orders,
                                                           unsigned threads = 1) {
  std::vector<MemberDecomposition> out(spectra.size());
  parallel_for(spectra.size(), threads, [&](std::size_t i) { out[i] = decompose_member(spectra[i], orders); });
  return out;
}

/// Unfolds each member with the model of the given order.
inline std::vector<UnfoldedSpectrum> unfold_ensemble(std::span<const Spectrum> spectra, int order,
                                                     double trim = kDefaultTrim, unsigned threads = 1) {
  std::vector<UnfoldedSpectrum> out(spectra.size());
  parallel_for(spectra.size(), threads, [&](std::size_t i) {
    const auto m = moments(spectra[i]);
    const ModeDecomposition dec(spectra[i], m.q_est, order, m.centroid, m.width());
    out[i] = unfold(spectra[i], dec.fit(order), trim);
  });
  return out;
}

struct MeanWithError {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline MeanWithError mean_with_error(std::span<const double> values) {
  MeanWithError r;
  if (values.empty()) return r;
  const auto n = static_cast<double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

struct MomentSummary {
  MeanWithError centroid, variance, gamma1, gamma2, q_est;
};

inline MomentSummary summarize_moments(std::span<const SpectralMoments> ms) {
  std::vector<double> c, v, g1, g2, q;
  for (const auto& m : ms) {
    c.push_back(m.centroid);
    v.push_back(m.variance);
    g1.push_back(m.gamma1);
    g2.push_back(m.gamma2);
    q.push_back(m.q_est);
  }
  return {mean_with_error(c), mean_with_error(v), mean_with_error(g1), mean_with_error(g2), mean_with_error(q)};
}

}  // namespace egoe
