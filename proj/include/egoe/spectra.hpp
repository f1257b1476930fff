#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "egoe/ensemble.hpp"
#include "egoe/errors.hpp"

namespace egoe {

/// Sorted eigenvalues of one ensemble member.
struct Spectrum {
  std::vector<double> levels;
  int member = -1;
  std::uint64_t seed = 0;

  std::size_t size() const { return levels.size(); }
};

struct SpectralMoments {
  double centroid = 0.0;
  double variance = 0.0;
  double gamma1 = 0.0;  ///< skewness μ3/σ³
  double gamma2 = 0.0;  ///< excess μ4/σ⁴ - 3
  double q_est = 0.0;   ///< clamp(1 + γ2, 0, 1 - 1e-6)

  double width() const { return std::sqrt(variance); }
};

inline constexpr double kMaxEstimatedQ = 1.0 - 1e-6;

/// Full spectrum of a real symmetric matrix, ascending.
inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw DomainError("eigenvalues: matrix is not square");
  if (!h.allFinite()) throw NumericError("eigenvalues: matrix has non-finite entries");
  if (h.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalues: solver did not converge");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

inline Spectrum eigenvalues(const EmbeddedHamiltonian& h) {
  return Spectrum{symmetric_eigenvalues(h.values), h.member,
                  member_seed(h.spec.master_seed, static_cast<std::uint64_t>(h.member))};
}

/// Population moments (divide by d).
inline SpectralMoments moments(std::span<const double> levels) {
  const auto d = static_cast<double>(levels.size());
  if (levels.size() < 4) throw DomainError("moments: need at least 4 levels");
  double mean = 0.0;
  for (double e : levels) mean += e;
  mean /= d;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double e : levels) {
    const double x = e - mean;
    const double x2 = x * x;
    m2 += x2;
    m3 += x2 * x;
    m4 += x2 * x2;
  }
  m2 /= d;
  m3 /= d;
  m4 /= d;
  if (!(m2 > 0.0)) throw DegenerateSpectrumError("moments: spectrum has zero variance");
  SpectralMoments out;
  out.centroid = mean;
  out.variance = m2;
  out.gamma1 = m3 / (m2 * std::sqrt(m2));
  out.gamma2 = m4 / (m2 * m2) - 3.0;
  out.q_est = std::clamp(1.0 + out.gamma2, 0.0, kMaxEstimatedQ);
  return out;
}

inline SpectralMoments moments(const Spectrum& s) { return moments(std::span<const double>(s.levels)); }

/// Zero centroid, unit width.
inline Spectrum standardize(const Spectrum& s) {
  if (s.size() < 2) throw DegenerateSpectrumError("standardize: need at least 2 levels");
  const auto d = static_cast<double>(s.size());
  double mean = 0.0;
  for (double e : s.levels) mean += e;
  mean /= d;
  double var = 0.0;
  for (double e : s.levels) var += (e - mean) * (e - mean);
  var /= d;
  if (!(var > 0.0)) throw DegenerateSpectrumError("standardize: spectrum has zero variance");
  const double sigma = std::sqrt(var);
  Spectrum out = s;
  for (double& e : out.levels) e = (e - mean) / sigma;
  return out;
}

}  // namespace egoe
