#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "egoe/decomposition.hpp"
#include "oracles/qnormal_oracle.hpp"

using namespace egoe;

namespace {

Spectrum spectrum(std::vector<double> v) { return Spectrum{std::move(v), 0, 0}; }

SmoothModel model(double q, int order, std::vector<double> coeffs, std::size_t d) {
  return SmoothModel{q, order, std::move(coeffs), d, 0.0, 1.0};
}

// Levels placed exactly at F̄^{-1}(i - 1/2).
Spectrum synthetic(const SmoothModel& m) {
  std::vector<double> levels(m.dimension);
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = inverse_smooth_F(m, static_cast<double>(i) + 0.5);
  return spectrum(std::move(levels));
}

Spectrum goe_like(std::size_t d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd h(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = i; j < h.cols(); ++j) h(i, j) = h(j, i) = g(rng);
  }
  return spectrum(symmetric_eigenvalues(h));
}

}  // namespace

TEST(Staircase, MidpointConvention) {
  std::vector<double> v(924);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const auto f = staircase(spectrum(v));
  EXPECT_EQ(f.front(), 0.5);
  EXPECT_EQ(f.back(), 923.5);
  const auto g = staircase(spectrum(std::vector<double>(7, 0.0)));
  EXPECT_EQ(g[3], 3.5);  // median of odd d: d/2
}

TEST(SmoothF, BareModelAtCentroidIsHalf) {
  EXPECT_NEAR(smooth_F(model(0.4, 2, {}, 924), 0.0), 462.0, 1e-9);
}

TEST(SmoothF, ZeroCoefficientsReduceToCdf) {
  const auto m = model(0.6, 5, {0.0, 0.0, 0.0}, 100);
  for (double x : {-2.0, -0.3, 0.9, 2.2}) EXPECT_NEAR(smooth_F(m, x), 100.0 * fqn_cdf(x, 0.6), 1e-8);
}

TEST(SmoothF, EdgeValuesWithFourthOrderCorrection) {
  const double q = 0.5;
  const auto m = model(q, 4, {0.0, 0.3}, 50);
  const double x0 = support_edge(q);
  EXPECT_NEAR(smooth_F(m, x0), 50.0, 1e-9);
  EXPECT_NEAR(smooth_F(m, -x0), 0.0, 1e-9);
  EXPECT_EQ(smooth_F(m, 3.0 * x0), 50.0);
  // Independent check that the H_4 weight integrates to zero.
  EXPECT_NEAR(oracle::qnormal_integral([q](double x) { return hermite_q(4, x, q); }, q, -x0, x0), 0.0, 1e-10);
}

TEST(SmoothModel, Validation) {
  EXPECT_THROW(model(0.5, 4, {0.1}, 10).validate(), DomainError);
  EXPECT_THROW(model(0.5, 1, {}, 10).validate(), DomainError);
  EXPECT_THROW(model(1.5, 2, {}, 10).validate(), DomainError);
  EXPECT_EQ(model(0.5, 4, {0.1, 0.2}, 10).coefficient(4), 0.2);
  EXPECT_EQ(model(0.5, 4, {0.1, 0.2}, 10).coefficient(6), 0.0);
}

TEST(Fit, OrderTwoIsBaseline) {
  const auto s = goe_like(200, 1);
  const auto m = moments(s);
  const ModeDecomposition dec(s, m.q_est, 4);
  const auto fit = dec.fit(2);
  EXPECT_TRUE(fit.coefficients.empty());
  const auto series = dec.level_motion(fit);
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = (s.levels[i] - m.centroid) / m.width();
    const double r = (i + 0.5) - 200.0 * fqn_cdf(e, m.q_est);
    ss += r * r;
  }
  EXPECT_NEAR(series.rms, std::sqrt(ss / 200.0), 1e-7);
  EXPECT_EQ(series.window_begin, 0u);
  EXPECT_EQ(series.window_end, 200u);
}

TEST(Fit, RecoversSyntheticCoefficients) {
  const auto truth = model(0.3, 4, {0.04, -0.06}, 300);
  const auto s = synthetic(truth);
  const auto lm = level_motion(s, truth);
  EXPECT_LT(lm.rms, 1e-8);
  const ModeDecomposition dec(s, truth.q, 4, truth.centroid, truth.width);
  const auto fit = dec.fit(4);
  ASSERT_EQ(fit.coefficients.size(), 2u);
  EXPECT_NEAR(fit.coefficients[0], 0.04, 1e-3);
  EXPECT_NEAR(fit.coefficients[1], -0.06, 1e-3);
  EXPECT_LT(dec.level_motion(fit).rms, 1e-6);
}

TEST(Fit, DeltaRmsNonIncreasingInOrder) {
  for (unsigned seed : {2u, 3u, 4u}) {
    const auto s = goe_like(150, seed);
    const auto m = moments(s);
    const ModeDecomposition dec(s, m.q_est, 6);
    double prev = std::numeric_limits<double>::infinity();
    for (int order = 2; order <= 6; ++order) {
      const double rms = dec.level_motion(dec.fit(order)).rms;
      EXPECT_LE(rms, prev + 1e-12) << "seed " << seed << " order " << order;
      prev = rms;
    }
  }
}

TEST(Fit, StandaloneHelpersAgreeWithDecomposition) {
  const auto s = goe_like(120, 8);
  const auto m = moments(s);
  const auto fit = fit_Sn(s, m.q_est, 5);
  const ModeDecomposition dec(s, m.q_est, 5);
  EXPECT_NEAR(level_motion(s, fit).rms, dec.level_motion(dec.fit(5)).rms, 1e-9);
}

TEST(Fit, Errors) {
  const auto s = spectrum({-1.0, 1.0});
  const ModeDecomposition dec(s, 0.2, 6, 0.0, 1.0);
  EXPECT_THROW(dec.fit(6), SingularFitError);
  EXPECT_THROW(dec.fit(7), DomainError);
  EXPECT_THROW(ModeDecomposition(s, 0.2, 4, 0.0, 0.0), DegenerateSpectrumError);
  const auto other = model(0.3, 2, {}, 2);
  EXPECT_THROW(dec.level_motion(other), DomainError);
}

TEST(GoeReference, Values) {
  EXPECT_NEAR(goe_delta_rms(924), 0.87300, 5e-5);
  EXPECT_NEAR(goe_delta_rms(1001), 0.87763, 5e-5);
  EXPECT_NEAR(goe_delta_rms(std::exp(std::numbers::pi * std::numbers::pi) / 2.0), 1.0, 1e-12);
  EXPECT_THROW(goe_delta_rms(1.0), DomainError);
}
