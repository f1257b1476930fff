#pragma once

// Lomb-Scargle normalized periodogram of the level motion Δ(Ê).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "egoe/decomposition.hpp"
#include "egoe/errors.hpp"
#include "egoe/fluct_stats.hpp"

namespace egoe {

struct LombScargleOptions {
  double oversample = 4.0;
  double hifac = 1.0;
};

struct PeriodogramResult {
  std::vector<double> frequency;  ///< cycles per unit of the abscissa
  std::vector<double> power;      ///< P(f), normalized by twice the series variance
  double peak_frequency = 0.0;    ///< f_p
  double peak_power = 0.0;        ///< P(f_p)
  double significance = 0.0;      ///< Λ = 100 (1 - FAP), percent
  std::size_t samples = 0;        ///< M, also used as the independent-frequency count
};

/// Λ = 100 (1 - e^{-P_max})^M, i.e. 100 (1 - false-alarm probability).
inline double significance_from_peak(double peak_power, std::size_t samples) {
  if (peak_power <= 0.0) return 0.0;
  return 100.0 * std::exp(static_cast<double>(samples) * std::log1p(-std::exp(-peak_power)));
}

/// Frequencies f_i = i / (T * oversample), i = 1 .. oversample*hifac*n/2, with
/// T the abscissa span. Trigonometric values are advanced by recurrence and
/// re-seeded exactly every 64 frequencies.
inline PeriodogramResult lomb_scargle(std::span<const double> t, std::span<const double> y,
                                      const LombScargleOptions& opt = {}) {
  const std::size_t n = t.size();
  if (y.size() != n) throw DomainError("lomb_scargle: abscissa and values differ in length");
  if (n < 16) throw DomainError("lomb_scargle: need at least 16 samples");
  if (!(opt.oversample > 0.0) || !(opt.hifac > 0.0)) throw DomainError("lomb_scargle: bad options");

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  if (!(var > 0.0)) throw NumericError("lomb_scargle: degenerate (constant) series");

  const auto [tmin_it, tmax_it] = std::minmax_element(t.begin(), t.end());
  const double span = *tmax_it - *tmin_it;
  if (!(span > 0.0)) throw DomainError("lomb_scargle: abscissa has zero span");
  const double tmid = 0.5 * (*tmax_it + *tmin_it);
  const double df = 1.0 / (span * opt.oversample);
  const auto nfreq = static_cast<std::size_t>(0.5 * opt.oversample * opt.hifac * static_cast<double>(n));

  std::vector<double> yc(n), wr(n), wi(n), wpr(n), wpi(n);
  for (std::size_t j = 0; j < n; ++j) {
    yc[j] = y[j] - mean;
    const double arg = 2.0 * std::numbers::pi * (t[j] - tmid) * df;
    const double s = std::sin(0.5 * arg);
    wpr[j] = -2.0 * s * s;
    wpi[j] = std::sin(arg);
  }

  PeriodogramResult out;
  out.samples = n;
  out.frequency.resize(nfreq);
  out.power.resize(nfreq);
  for (std::size_t i = 0; i < nfreq; ++i) {
    const double f = df * static_cast<double>(i + 1);
    if (i % 64 == 0) {
      for (std::size_t j = 0; j < n; ++j) {
        const double arg = 2.0 * std::numbers::pi * (t[j] - tmid) * f;
        wr[j] = std::cos(arg);
        wi[j] = std::sin(arg);
      }
    }
    double sumsh = 0.0, sumc2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sumsh += wi[j] * wr[j];
      sumc2 += (wr[j] - wi[j]) * (wr[j] + wi[j]);
    }
    // tan(2ωτ) = Σ sin 2ωt / Σ cos 2ωt
    const double wtau = 0.5 * std::atan2(2.0 * sumsh, sumc2);
    const double swtau = std::sin(wtau), cwtau = std::cos(wtau);
    double sums = 0.0, sumc = 0.0, sumsy = 0.0, sumcy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = wi[j], c = wr[j];
      const double ss = s * cwtau - c * swtau;
      const double cc = c * cwtau + s * swtau;
      sums += ss * ss;
      sumc += cc * cc;
      sumsy += yc[j] * ss;
      sumcy += yc[j] * cc;
      const double wtemp = wr[j];
      wr[j] = wr[j] * wpr[j] - wi[j] * wpi[j] + wr[j];
      wi[j] = wi[j] * wpr[j] + wtemp * wpi[j] + wi[j];
    }
    double p = 0.0;
    if (sumc > 0.0) p += sumcy * sumcy / sumc;
    if (sums > 0.0) p += sumsy * sumsy / sums;
    p *= 0.5 / var;
    out.frequency[i] = f;
    out.power[i] = p;
    if (p > out.peak_power) {
      out.peak_power = p;
      out.peak_frequency = f;
    }
  }
  out.significance = significance_from_peak(out.peak_power, n);
  return out;
}

/// Periodogram of the central (1 - trim) fraction of a level-motion series,
/// abscissa Ê.
inline PeriodogramResult level_motion_periodogram(const LevelMotionSeries& series,
                                                  double trim = kDefaultTrim,
                                                  const LombScargleOptions& opt = {}) {
  const std::size_t cut = trim_count(series.size(), trim);
  if (series.size() < 2 * cut + 16) throw DomainError("level_motion_periodogram: series too short");
  const std::size_t len = series.size() - 2 * cut;
  return lomb_scargle(std::span<const double>(series.e_hat).subspan(cut, len),
                      std::span<const double>(series.delta).subspan(cut, len), opt);
}

struct SeparationInput {
  int k = 0;
  int order = 2;
  std::vector<PeriodogramResult> members;
};

struct SeparationRow {
  int k = 0;
  int order = 2;
  double mean_significance = 0.0;     ///< ensemble mean Λ
  double mean_peak_frequency = 0.0;   ///< ensemble mean f_p
  std::size_t members = 0;
};

inline std::vector<SeparationRow> separation_report(std::span<const SeparationInput> inputs) {
  std::vector<SeparationRow> rows;
  rows.reserve(inputs.size());
  for (const auto& in : inputs) {
    if (in.members.empty()) throw DomainError("separation_report: no members for k=" + std::to_string(in.k));
    SeparationRow row{in.k, in.order, 0.0, 0.0, in.members.size()};
    for (const auto& p : in.members) {
      row.mean_significance += p.significance;
      row.mean_peak_frequency += p.peak_frequency;
    }
    row.mean_significance /= static_cast<double>(in.members.size());
    row.mean_peak_frequency /= static_cast<double>(in.members.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace egoe
