#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "egoe/periodogram.hpp"

using namespace egoe;

namespace {

std::vector<double> uneven_abscissa(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> t(n);
  for (auto& x : t) x = u(rng);
  std::sort(t.begin(), t.end());
  return t;
}

// Direct Lomb-Scargle normalized power with no trigonometric recurrence.
double direct_power(const std::vector<double>& t, const std::vector<double>& y, double f) {
  const double w = 2 * std::numbers::pi * f;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= y.size();
  double var = 0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= (y.size() - 1.0);
  double s2 = 0, c2 = 0;
  for (double x : t) {
    s2 += std::sin(2 * w * x);
    c2 += std::cos(2 * w * x);
  }
  const double tau = std::atan2(s2, c2) / (2 * w);
  double cy = 0, sy = 0, cc = 0, ss = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double c = std::cos(w * (t[j] - tau)), s = std::sin(w * (t[j] - tau));
    cy += (y[j] - mean) * c;
    sy += (y[j] - mean) * s;
    cc += c * c;
    ss += s * s;
  }
  return (cy * cy / cc + sy * sy / ss) / (2 * var);
}

}  // namespace

TEST(LombScargle, PureSinusoid) {
  const auto t = uneven_abscissa(800, 1);
  const double f0 = 3.3;
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = std::sin(2 * std::numbers::pi * f0 * t[i]);
  const auto p = lomb_scargle(t, y);
  const double df = p.frequency[1] - p.frequency[0];
  EXPECT_LE(std::abs(p.peak_frequency - f0), df + 1e-12);
  EXPECT_GT(p.significance, 99.0);
  EXPECT_EQ(p.samples, 800u);
}

TEST(LombScargle, GridAndPowerMatchDirectEvaluation) {
  const auto t = uneven_abscissa(300, 2);
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> y(t.size());
  for (auto& v : y) v = g(rng);
  const auto p = lomb_scargle(t, y);
  const double span = t.back() - t.front();
  ASSERT_EQ(p.frequency.size(), 600u);  // oversample * hifac * n / 2
  EXPECT_NEAR(p.frequency.front(), 1.0 / (4.0 * span), 1e-14);
  EXPECT_NEAR(p.frequency.back(), 300.0 / (2.0 * span), 1e-10);
  for (std::size_t i : {0u, 63u, 64u, 200u, 599u}) {
    EXPECT_NEAR(p.power[i], direct_power(t, y, p.frequency[i]), 1e-9) << i;
  }
  for (double v : p.power) EXPECT_GE(v, 0.0);
  EXPECT_GE(p.significance, 0.0);
  EXPECT_LE(p.significance, 100.0);
  EXPECT_NE(std::find(p.frequency.begin(), p.frequency.end(), p.peak_frequency), p.frequency.end());
}

TEST(LombScargle, WhiteNoiseMedianSignificance) {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  std::vector<double> lambda;
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = uneven_abscissa(256, 1000 + trial);
    std::vector<double> y(t.size());
    for (auto& v : y) v = g(rng);
    lambda.push_back(lomb_scargle(t, y).significance);
  }
  std::nth_element(lambda.begin(), lambda.begin() + 100, lambda.end());
  // Noise is far from the 70 percent level used to call a peak significant.
  EXPECT_LT(lambda[100], 70.0);
}

TEST(LombScargle, ConstantOffsetInvariance) {
  const auto t = uneven_abscissa(200, 3);
  std::vector<double> y(t.size()), z(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    y[i] = std::cos(5.0 * t[i]) + 0.3 * std::sin(17.0 * t[i]);
    z[i] = y[i] + 42.0;
  }
  const auto a = lomb_scargle(t, y), b = lomb_scargle(t, z);
  for (std::size_t i = 0; i < a.power.size(); ++i) EXPECT_NEAR(a.power[i], b.power[i], 1e-9);
}

TEST(LombScargle, Errors) {
  const auto t = uneven_abscissa(20, 4);
  EXPECT_THROW(lomb_scargle(t, std::vector<double>(20, 1.0)), NumericError);
  EXPECT_THROW(lomb_scargle(std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)), DomainError);
  EXPECT_THROW(lomb_scargle(t, std::vector<double>(19, 0.0)), DomainError);
}

TEST(Significance, MonotoneInPeakPower) {
  double prev = 0.0;
  for (double p = 0.5; p < 30.0; p += 0.5) {
    const double l = significance_from_peak(p, 800);
    EXPECT_GE(l, prev);
    EXPECT_LE(l, 100.0);
    prev = l;
  }
  EXPECT_EQ(significance_from_peak(0.0, 10), 0.0);
  EXPECT_NEAR(significance_from_peak(std::log(800.0) + 10.0, 800), 100.0 * std::exp(-std::exp(-10.0)), 1e-6);
}

TEST(Separation, EnsembleMeans) {
  PeriodogramResult a, b;
  a.significance = 80;
  a.peak_frequency = 0.5;
  b.significance = 20;
  b.peak_frequency = 1.5;
  const std::vector<SeparationInput> in{{2, 3, {a, b}}};
  const auto rows = separation_report(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_significance, 50.0);
  EXPECT_EQ(rows[0].mean_peak_frequency, 1.0);
  EXPECT_EQ(rows[0].members, 2u);
  const std::vector<SeparationInput> empty{{2, 3, {}}};
  EXPECT_THROW(separation_report(empty), DomainError);
}

TEST(LevelMotion, UsesCentralWindow) {
  LevelMotionSeries s;
  for (int i = 0; i < 100; ++i) {
    s.e_hat.push_back(-2.0 + 0.04 * i);
    s.delta.push_back(std::sin(3.0 * i));
  }
  const auto p = level_motion_periodogram(s, 0.1);
  EXPECT_EQ(p.samples, 90u);
}
