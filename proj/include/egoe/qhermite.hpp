#pragma once

// q-numbers, q-Hermite polynomials H_n(x|q) and their weight function, the
// q-normal density f_qN(x|q) on s(q) = (-2/sqrt(1-q), 2/sqrt(1-q)).
//
// Integrals against f_qN are done in the angle variable x = x0 sin(θ). There
// f_qN(x) dx = P(cos 2θ) dθ / 2π with
//   P(c) = Π_{i>=0} (1 - q^{i+1}) (1 + 2 q^i c + q^{2i}),
// which is smooth and removes the inverse-square-root edge factor.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include "egoe/errors.hpp"

namespace egoe {

/// q in [0, 1].
class QParameter {
 public:
  explicit QParameter(double q) : q_(q) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw DomainError("q must lie in [0, 1], got " + std::to_string(q));
    }
  }
  double value() const { return q_; }
  operator double() const { return q_; }

 private:
  double q_;
};

/// [n]_q = 1 + q + ... + q^{n-1} = (1 - q^n)/(1 - q); equals n at q = 1.
inline double qnumber(int n, double q) {
  if (n < 0) throw DomainError("qnumber: n must be >= 0");
  if (q == 1.0) return static_cast<double>(n);
  if (n <= 64) {
    double sum = 0.0, p = 1.0;
    for (int j = 0; j < n; ++j) {
      sum += p;
      p *= q;
    }
    return sum;
  }
  return (1.0 - std::pow(q, n)) / (1.0 - q);
}

/// [n]_q! = [1]_q [2]_q ... [n]_q, with [0]_q! = 1.
inline double qfactorial(int n, double q) {
  if (n < 0) throw DomainError("qfactorial: n must be >= 0");
  double p = 1.0;
  for (int j = 1; j <= n; ++j) p *= qnumber(j, q);
  return p;
}

/// H_n(x|q) from H_{n+1} = x H_n - [n]_q H_{n-1}, H_0 = 1, H_{-1} = 0.
inline double hermite_q(int n, double x, double q) {
  if (n < 0) throw DomainError("hermite_q: n must be >= 0");
  double prev = 0.0, cur = 1.0;
  for (int j = 0; j < n; ++j) {
    const double next = x * cur - qnumber(j, q) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Writes H_0 .. H_{out.size()-1} at x.
inline void hermite_q_sequence(double x, double q, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  double qn = 1.0;  // [j]_q, built incrementally
  double qpow = 1.0;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    // [j]_q = [j-1]_q + q^{j-1}
    if (j > 1) {
      qpow *= q;
      qn += qpow;
    }
    out[j + 1] = x * out[j] - qn * out[j - 1];
  }
}

/// Edge x0 = 2/sqrt(1-q) of the support; +inf at q = 1.
inline double support_edge(double q) {
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return 2.0 / std::sqrt(1.0 - q);
}

inline constexpr double kProductTruncation = 1e-16;
/// Above this q the product is evaluated through its theta-series form.
inline constexpr double kProductSeriesSwitch = 0.99;

namespace detail {

inline void check_q(double q, const char* where) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError(std::string(where) + ": q must lie in [0, 1], got " + std::to_string(q));
  }
}

/// P(c) for c = cos 2θ, q < 1.
inline double qnormal_product(double c, double q) {
  if (q <= kProductSeriesSwitch) {
    double p = 1.0;
    double qi = 1.0;  // q^i
    for (;;) {
      const double qnext = qi * q;  // q^{i+1}
      p *= (1.0 - qnext) * (1.0 + 2.0 * qi * c + qi * qi);
      if (qnext < kProductTruncation) break;
      qi = qnext;
    }
    return p;
  }
  // Jacobi triple product: P = Σ_{n>=0} q^{n(n+1)/2} 2 [cos 2nθ + cos 2(n+1)θ],
  // with cos 2nθ = T_n(c).
  const double lq = std::log(q);
  double t_prev = 1.0;  // T_0
  double t_cur = c;     // T_1
  double sum = 0.0;
  for (int n = 0;; ++n) {
    const double weight = std::exp(0.5 * n * (n + 1) * lq);
    sum += 2.0 * weight * (t_prev + t_cur);
    if (weight < 1e-18) break;
    const double t_next = 2.0 * c * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return std::max(sum, 0.0);
}

/// Density in the angle variable: f_qN(x) dx = theta_weight(θ) dθ.
inline double theta_weight(double theta, double q) {
  return qnormal_product(std::cos(2.0 * theta), q) / (2.0 * std::numbers::pi);
}

inline double gaussian_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace detail

/// f_qN(x|q); zero outside s(q); the Gaussian at q = 1.
inline double fqn_density(double x, double q) {
  detail::check_q(q, "fqn_density");
  if (q == 1.0) return detail::gaussian_density(x);
  const double x0 = support_edge(q);
  if (!(std::abs(x) < x0)) return 0.0;
  const double c = 1.0 - 2.0 * (x * x) / (x0 * x0);
  return detail::qnormal_product(c, q) / (2.0 * std::numbers::pi * std::sqrt(x0 * x0 - x * x));
}

inline constexpr double kCdfTolerance = 1e-9;

/// ∫_{-x0}^{x} f_qN(t|q) dt by adaptive Gauss-Kronrod in the angle variable.
inline double fqn_cdf(double x, double q) {
  detail::check_q(q, "fqn_cdf");
  if (q == 1.0) return detail::gaussian_cdf(x);
  const double x0 = support_edge(q);
  if (x <= -x0) return 0.0;
  if (x >= x0) return 1.0;
  const double theta = std::asin(x / x0);
  double error = 0.0;
  auto w = [q](double t) { return detail::theta_weight(t, q); };
  // Integrate over the shorter side for accuracy in the tails.
  const double half = theta <= 0.0
      ? boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            w, -std::numbers::pi / 2, theta, 20, 1e-14, &error)
      : boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            w, theta, std::numbers::pi / 2, 20, 1e-14, &error);
  if (!(error < kCdfTolerance)) {
    throw NumericError("fqn_cdf: quadrature error estimate " + std::to_string(error) +
                       " above tolerance");
  }
  return std::clamp(theta <= 0.0 ? half : 1.0 - half, 0.0, 1.0);
}

/// ∫_{s(q)} g(x) f_qN(x|q) dx for smooth g, q < 1. In the angle variable the
/// integrand extends to a smooth 2π-periodic function, so the trapezoid rule
/// converges geometrically; the node count doubles until successive estimates
/// agree to `rel_tol` (relative to the L1 size of the integrand).
template <class G>
double qnormal_expectation(G&& g, double q, double rel_tol = 1e-14) {
  detail::check_q(q, "qnormal_expectation");
  if (q >= 1.0) throw DomainError("qnormal_expectation: needs q < 1 (bounded support)");
  const double x0 = support_edge(q);
  // ∫_{-π/2}^{π/2} = ½ ∮ by the symmetry θ -> π - θ.
  auto trapezoid = [&](int n, double* l1) {
    double sum = 0.0, abs_sum = 0.0;
    const double h = 2.0 * std::numbers::pi / n;
    for (int i = 0; i < n; ++i) {
      const double t = -std::numbers::pi + h * i;
      const double v = g(x0 * std::sin(t)) * detail::theta_weight(t, q);
      sum += v;
      abs_sum += std::abs(v);
    }
    *l1 = 0.5 * h * abs_sum;
    return 0.5 * h * sum;
  };
  double l1 = 0.0;
  double prev = trapezoid(64, &l1);
  for (int n = 128; n <= (1 << 20); n *= 2) {
    const double cur = trapezoid(n, &l1);
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, l1)) return cur;
    prev = cur;
  }
  throw NumericError("qnormal_expectation: trapezoid rule did not converge");
}

/// ∫ H_n H_m f_qN dx over s(q); equals [n]_q! δ_nm.
inline double orthogonality_integral(int n, int m, double q) {
  if (n < 0 || m < 0) throw DomainError("orthogonality_integral: negative degree");
  if (q > 1.0 - 1e-3) throw DomainError("orthogonality_integral: needs q <= 1 - 1e-3");
  return qnormal_expectation(
      [n, m, q](double x) { return hermite_q(n, x, q) * hermite_q(m, x, q); }, q);
}

/// Partial integrals I_n(x) = ∫_{lower}^{x} f_qN(t|q) H_n(t|q) dt, n = 0..n_max,
/// for every x in `points` (any order). Row i of the result belongs to points[i].
///
/// Uses composite 20-point Gauss-Legendre in the angle variable with panels no
/// wider than π/256, accumulating from the lower edge through the sorted points.
/// Points beyond the support get the exact edge values (0 below; 1 for n = 0 and
/// 0 otherwise above, by orthogonality to H_0). At q = 1 the closed forms
/// I_0 = Φ(x), I_n = -φ(x) He_{n-1}(x) are used.
inline Eigen::MatrixXd weighted_partial_integrals(std::span<const double> points, double q,
                                                  int n_max) {
  detail::check_q(q, "weighted_partial_integrals");
  if (n_max < 0) throw DomainError("weighted_partial_integrals: n_max must be >= 0");
  const auto rows = static_cast<Eigen::Index>(points.size());
  const Eigen::Index cols = n_max + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  std::vector<double> h(static_cast<std::size_t>(cols));

  if (q == 1.0) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double x = points[static_cast<std::size_t>(i)];
      out(i, 0) = detail::gaussian_cdf(x);
      if (n_max >= 1) {
        hermite_q_sequence(x, 1.0, h);
        const double phi = detail::gaussian_density(x);
        for (Eigen::Index n = 1; n < cols; ++n) out(i, n) = -phi * h[static_cast<std::size_t>(n - 1)];
      }
    }
    return out;
  }

  const double x0 = support_edge(q);
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  constexpr double kMaxPanel = std::numbers::pi / 256;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(cols);
  auto integrate_panel = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t j = 0; j < abscissa.size(); ++j) {
      const int signs = abscissa[j] == 0.0 ? 1 : 2;
      for (int s = 0; s < signs; ++s) {
        const double t = mid + (s == 0 ? 1.0 : -1.0) * half * abscissa[j];
        const double w = half * weights[j] * detail::theta_weight(t, q);
        hermite_q_sequence(x0 * std::sin(t), q, h);
        for (Eigen::Index n = 0; n < cols; ++n) acc(n) += w * h[static_cast<std::size_t>(n)];
      }
    }
  };

  double position = -std::numbers::pi / 2;
  for (std::size_t idx : order) {
    const double x = points[idx];
    const auto row = static_cast<Eigen::Index>(idx);
    if (!std::isfinite(x)) throw NumericError("weighted_partial_integrals: non-finite point");
    if (x <= -x0) continue;  // row stays zero
    if (x >= x0) {
      out(row, 0) = 1.0;
      continue;
    }
    const double theta = std::asin(x / x0);
    if (theta > position) {
      const int panels = std::max(1, static_cast<int>(std::ceil((theta - position) / kMaxPanel)));
      const double step = (theta - position) / panels;
      for (int p = 0; p < panels; ++p) {
        integrate_panel(position + p * step, p + 1 == panels ? theta : position + (p + 1) * step);
      }
      position = theta;
    }
    out.row(row) = acc.transpose();
  }
  return out;
}

/// The q-normal distribution for a fixed q.
class QNormalDensity {
 public:
  explicit QNormalDensity(QParameter q) : q_(q.value()), x0_(support_edge(q.value())) {}

  double q() const { return q_; }
  double lower() const { return -x0_; }
  double upper() const { return x0_; }
  double truncation_tolerance() const { return kProductTruncation; }

  double operator()(double x) const { return fqn_density(x, q_); }
  double cdf(double x) const { return fqn_cdf(x, q_); }

 private:
  double q_;
  double x0_;
};

}  // namespace egoe
