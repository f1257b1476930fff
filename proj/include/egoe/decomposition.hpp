#pragma once

// Normal-mode decomposition of a spectrum about the q-normal density:
//   F̄(E) = d [ F_q(Ê) + Σ_{n=3}^{n0} S_n/[n]_q! ∫_{lower}^{Ê} f_qN H_n dx ],
// with Ê = (E - ε)/σ, and the level motion Δ(E_i) = F(E_i) - F̄(E_i).

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "egoe/errors.hpp"
#include "egoe/qhermite.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

inline constexpr int kFirstCorrectionOrder = 3;

struct SmoothModel {
  double q = 0.0;
  int order = 2;                      ///< n0; 2 means the bare q-normal
  std::vector<double> coefficients;   ///< S_3 .. S_{n0}
  std::size_t dimension = 0;          ///< d
  double centroid = 0.0;              ///< ε of the raw spectrum
  double width = 1.0;                 ///< σ of the raw spectrum

  void validate() const {
    detail::check_q(q, "SmoothModel");
    if (order < 2) throw DomainError("SmoothModel: order must be >= 2");
    if (coefficients.size() != static_cast<std::size_t>(order - 2)) {
      throw DomainError("SmoothModel: expected " + std::to_string(order - 2) + " coefficients");
    }
    if (!(width > 0.0)) throw DomainError("SmoothModel: width must be positive");
  }

  double e_hat(double energy) const { return (energy - centroid) / width; }

  /// S_n, zero for n outside 3..order.
  double coefficient(int n) const {
    if (n < kFirstCorrectionOrder || n > order) return 0.0;
    return coefficients[static_cast<std::size_t>(n - kFirstCorrectionOrder)];
  }
};

/// Exact distribution function at the levels, midpoint convention F(E_i) = i - 1/2.
inline std::vector<double> staircase(const Spectrum& s) {
  std::vector<double> f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i) + 0.5;
  return f;
}

namespace detail {

inline double correction_sum(const SmoothModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& integrals) {
  double sum = integrals(0);
  for (int n = kFirstCorrectionOrder; n <= model.order; ++n) {
    sum += model.coefficient(n) / qfactorial(n, model.q) * integrals(n);
  }
  return static_cast<double>(model.dimension) * sum;
}

}  // namespace detail

/// F̄ at each energy. Energies beyond s(q) get the edge values 0 or d.
inline std::vector<double> smooth_F(const SmoothModel& model, std::span<const double> energies) {
  model.validate();
  std::vector<double> e_hat(energies.size());
  for (std::size_t i = 0; i < e_hat.size(); ++i) e_hat[i] = model.e_hat(energies[i]);
  const Eigen::MatrixXd integrals = weighted_partial_integrals(e_hat, model.q, model.order);
  std::vector<double> out(energies.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = detail::correction_sum(model, integrals.row(static_cast<Eigen::Index>(i)));
  }
  return out;
}

inline double smooth_F(const SmoothModel& model, double energy) {
  const double e[1] = {energy};
  return smooth_F(model, std::span<const double>(e, 1))[0];
}

/// Energy E with F̄(E) = target, by bisection over the support. Requires F̄ increasing.
inline double inverse_smooth_F(const SmoothModel& model, double target, double tol = 1e-13) {
  model.validate();
  const double x0 = std::isfinite(support_edge(model.q)) ? support_edge(model.q) : 40.0;
  double lo = model.centroid - x0 * model.width;
  double hi = model.centroid + x0 * model.width;
  for (int it = 0; it < 200 && hi - lo > tol * model.width; ++it) {
    const double mid = 0.5 * (lo + hi);
    (smooth_F(model, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct LevelMotionSeries {
  int order = 2;
  std::vector<double> e_hat;   ///< normalized energies Ê_i
  std::vector<double> delta;   ///< Δ_i = F(E_i) - F̄(E_i)
  double rms = 0.0;            ///< Δ_RMS over [window_begin, window_end)
  std::size_t window_begin = 0;
  std::size_t window_end = 0;

  std::size_t size() const { return delta.size(); }
};

/// Partial integrals of one spectrum cached up to a maximum order, so that
/// every order n0 <= max_order can be fitted without repeating quadrature.
class ModeDecomposition {
 public:
  /// Standardizes with the spectrum's own centroid and width.
  ModeDecomposition(const Spectrum& s, double q, int max_order)
      : ModeDecomposition(s, q, max_order, moments(s).centroid, moments(s).width()) {}

  ModeDecomposition(const Spectrum& s, double q, int max_order, double centroid, double width)
      : q_(q), max_order_(max_order), centroid_(centroid), width_(width) {
    detail::check_q(q, "ModeDecomposition");
    if (max_order < 2) throw DomainError("ModeDecomposition: order must be >= 2");
    if (!(width > 0.0)) throw DegenerateSpectrumError("ModeDecomposition: width must be positive");
    if (s.size() < 2) throw DomainError("ModeDecomposition: need at least 2 levels");
    e_hat_.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) e_hat_[i] = (s.levels[i] - centroid) / width;
    integrals_ = weighted_partial_integrals(e_hat_, q, max_order);
    staircase_ = staircase(s);
  }

  double q() const { return q_; }
  int max_order() const { return max_order_; }
  std::size_t dimension() const { return e_hat_.size(); }
  const std::vector<double>& e_hat() const { return e_hat_; }
  const Eigen::MatrixXd& integrals() const { return integrals_; }

  /// Least-squares S_3..S_{order} minimizing Σ Δ(E_i)². F̄ is linear in S_n:
  /// design Φ_{i,n} = d/[n]_q! I_n(Ê_i), target F(E_i) - d F_q(Ê_i).
  SmoothModel fit(int order) const {
    if (order < 2 || order > max_order_) {
      throw DomainError("fit: order " + std::to_string(order) + " outside [2, " +
                        std::to_string(max_order_) + "]");
    }
    SmoothModel model{q_, order, {}, dimension(), centroid_, width_};
    if (order == 2) return model;
    const auto rows = static_cast<Eigen::Index>(dimension());
    const Eigen::Index cols = order - 2;
    if (rows < cols) throw SingularFitError("fit: fewer levels than coefficients");
    const double d = static_cast<double>(dimension());
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      target(i) = staircase_[static_cast<std::size_t>(i)] - d * integrals_(i, 0);
      for (Eigen::Index c = 0; c < cols; ++c) {
        const int n = static_cast<int>(c) + kFirstCorrectionOrder;
        design(i, c) = d / qfactorial(n, q_) * integrals_(i, n);
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols) {
      throw SingularFitError("fit: design matrix has rank " + std::to_string(qr.rank()) +
                             " < " + std::to_string(cols) + " (order " + std::to_string(order) + ")");
    }
    const Eigen::VectorXd solution = qr.solve(target);
    model.coefficients.assign(solution.data(), solution.data() + solution.size());
    return model;
  }

  LevelMotionSeries level_motion(const SmoothModel& model) const {
    if (model.q != q_ || model.order > max_order_ || model.dimension != dimension() ||
        model.centroid != centroid_ || model.width != width_) {
      throw DomainError("level_motion: model was not fitted on this decomposition");
    }
    LevelMotionSeries out;
    out.order = model.order;
    out.e_hat = e_hat_;
    out.delta.resize(dimension());
    double sum2 = 0.0;
    for (std::size_t i = 0; i < dimension(); ++i) {
      const double fbar = detail::correction_sum(model, integrals_.row(static_cast<Eigen::Index>(i)));
      out.delta[i] = staircase_[i] - fbar;
      sum2 += out.delta[i] * out.delta[i];
    }
    out.window_begin = 0;
    out.window_end = dimension();
    out.rms = std::sqrt(sum2 / static_cast<double>(dimension()));
    return out;
  }

 private:
  double q_;
  int max_order_;
  double centroid_;
  double width_;
  std::vector<double> e_hat_;
  std::vector<double> staircase_;
  Eigen::MatrixXd integrals_;
};

inline SmoothModel fit_Sn(const Spectrum& s, double q, int order) {
  return ModeDecomposition(s, q, order).fit(order);
}

/// Δ_i = F(E_i) - F̄(E_i) over the full spectrum.
inline LevelMotionSeries level_motion(const Spectrum& s, const SmoothModel& model) {
  model.validate();
  if (model.dimension != s.size()) throw DomainError("level_motion: model dimension mismatch");
  const auto fbar = smooth_F(model, std::span<const double>(s.levels));
  LevelMotionSeries out;
  out.order = model.order;
  out.e_hat.resize(s.size());
  out.delta.resize(s.size());
  double sum2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.e_hat[i] = model.e_hat(s.levels[i]);
    out.delta[i] = (static_cast<double>(i) + 0.5) - fbar[i];
    sum2 += out.delta[i] * out.delta[i];
  }
  out.window_begin = 0;
  out.window_end = s.size();
  out.rms = s.size() ? std::sqrt(sum2 / static_cast<double>(s.size())) : 0.0;
  return out;
}

/// GOE level-motion width: Δ²_RMS = ln(2d)/π².
inline double goe_delta_rms(double d) {
  if (!(d >= 2.0)) throw DomainError("goe_delta_rms: need d >= 2");
  return std::sqrt(std::log(2.0 * d)) / std::numbers::pi;
}

}  // namespace egoe
