#pragma once

// Independent evaluation of the q-normal weight: the infinite product taken
// directly in x (no angle substitution), integrated with tanh-sinh quadrature,
// which handles the inverse-square-root edge behaviour natively.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

inline double qnormal_density(double x, double q) {
  if (q == 1.0) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  const double x02 = 4.0 / (1.0 - q);
  if (x * x >= x02) return 0.0;
  double prod = 1.0;
  double qi = 1.0;  // q^i
  for (int i = 0; i < 100000; ++i) {
    prod *= (1.0 - qi * q) * ((1.0 + qi) * (1.0 + qi) - qi * 4.0 * x * x / x02);
    qi *= q;
    if (qi * q < 1e-18) break;
  }
  return prod / (2.0 * std::numbers::pi * std::sqrt(x02 - x * x));
}

inline double qnormal_edge(double q) { return 2.0 / std::sqrt(1.0 - q); }

/// int_{lo}^{hi} g(x) f_qN(x|q) dx for bounded support.
template <class G>
double qnormal_integral(G g, double q, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double x) { return g(x) * qnormal_density(x, q); }, lo, hi, 1e-13);
}

/// Closed-form CDF of the semicircle (q = 0).
inline double semicircle_cdf(double x) {
  return 0.5 + (x * std::sqrt(4.0 - x * x) + 4.0 * std::asin(0.5 * x)) / (4.0 * std::numbers::pi);
}

}  // namespace oracle
