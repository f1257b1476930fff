#pragma once

// k-body GOE sampling and its embedding into m-particle spaces (EGOE(k) / BEGOE(k)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "egoe/errors.hpp"
#include "egoe/fock_space.hpp"

namespace egoe {

struct EnsembleSpec {
  Statistics statistics = Statistics::Fermion;
  int m = 6;  ///< particles
  int N = 12; ///< single-particle states
  int k = 2;  ///< body rank of the interaction
  int members = 50;
  std::uint64_t master_seed = 42;
  double nu2 = 1.0;  ///< variance of the off-diagonal k-body matrix elements

  void validate() const {
    if (N < 1) throw DomainError("N must be >= 1");
    if (m < 1) throw DomainError("m must be >= 1");
    if (k < 1 || k > m) {
      throw DomainError("k must satisfy 1 <= k <= m (k=" + std::to_string(k) +
                        ", m=" + std::to_string(m) + ")");
    }
    if (statistics == Statistics::Fermion && m > N) throw DomainError("fermions need m <= N");
    if (members < 1) throw DomainError("members must be >= 1");
    if (!(nu2 > 0.0) || !std::isfinite(nu2)) throw DomainError("nu2 must be positive and finite");
  }

  std::uint64_t m_dimension() const { return dimension(statistics, N, m); }
  std::uint64_t k_dimension() const { return dimension(statistics, N, k); }

  bool operator==(const EnsembleSpec&) const = default;
};

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of ensemble member `member`: mix64(mix64(master_seed) ^ mix64(member + 1)).
/// Members get decorrelated streams and the map is stable across releases.
inline std::uint64_t member_seed(std::uint64_t master_seed, std::uint64_t member) {
  return mix64(mix64(master_seed) ^ mix64(member + 1));
}

/// GOE matrix in k-particle space, indexed by the k-particle Basis order.
struct KBodyMatrix {
  Eigen::MatrixXd values;
  int member = 0;
  std::uint64_t seed = 0;

  Eigen::Index dimension() const { return values.rows(); }
};

/// H(m) for one ensemble member.
struct EmbeddedHamiltonian {
  Eigen::MatrixXd values;
  EnsembleSpec spec;
  int member = 0;

  Eigen::Index dimension() const { return values.rows(); }
};

/// Draws V_{k:αγ}: zero mean, variance nu2 off the diagonal and 2*nu2 on it.
/// Entries are drawn row by row over the upper triangle from an mt19937_64
/// stream seeded with member_seed(), so results are reproducible bit for bit.
inline KBodyMatrix sample_kbody(const EnsembleSpec& spec, int member) {
  spec.validate();
  if (member < 0 || member >= spec.members) {
    throw DomainError("member index " + std::to_string(member) + " out of range [0, " +
                      std::to_string(spec.members) + ")");
  }
  const auto d = static_cast<Eigen::Index>(spec.k_dimension());
  const std::uint64_t seed = member_seed(spec.master_seed, static_cast<std::uint64_t>(member));
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double off = std::sqrt(spec.nu2);
  const double diag = std::sqrt(2.0 * spec.nu2);

  Eigen::MatrixXd v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v(i, i) = diag * normal(engine);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double x = off * normal(engine);
      v(i, j) = x;
      v(j, i) = x;
    }
  }
  return KBodyMatrix{std::move(v), member, seed};
}

/// Precomputed action of Σ V_{αγ} A†_α A_γ on the m-particle basis. Only
/// transitions landing on or above the diagonal (target <= source) are kept;
/// the lower triangle is mirrored, so the result is exactly symmetric.
class Embedder {
 public:
  struct Entry {
    std::uint32_t row;    // target m-state
    std::uint32_t col;    // source m-state
    std::uint32_t alpha;  // created k-state
    std::uint32_t gamma;  // annihilated k-state
    double amplitude;
  };

  Embedder(Statistics s, int N, int m, int k, std::uint64_t cap = kDefaultDimensionCap)
      : statistics_(s), N_(N), m_(m), k_(k), m_basis_(s, N, m, cap), k_basis_(s, N, k, cap) {
    if (k < 1 || k > m) throw DomainError("Embedder: need 1 <= k <= m");
    if (m_basis_.size() > 0xFFFFFFFFULL || k_basis_.size() > 0xFFFFFFFFULL) {
      throw CapacityError("Embedder: basis too large for 32-bit indices");
    }
    build();
  }

  explicit Embedder(const EnsembleSpec& spec)
      : Embedder(spec.statistics, spec.N, spec.m, spec.k) {}

  Statistics statistics() const { return statistics_; }
  int num_states() const { return N_; }
  int particles() const { return m_; }
  int rank() const { return k_; }
  const Basis& m_basis() const { return m_basis_; }
  const Basis& k_basis() const { return k_basis_; }
  const std::vector<Entry>& entries() const { return entries_; }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const {
    const auto dk = static_cast<Eigen::Index>(k_basis_.size());
    if (v.rows() != dk || v.cols() != dk) {
      throw DomainError("embed: k-body matrix has dimension " + std::to_string(v.rows()) + "x" +
                        std::to_string(v.cols()) + ", expected " + std::to_string(dk));
    }
    const auto d = static_cast<Eigen::Index>(m_basis_.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (const Entry& e : entries_) {
      h(e.row, e.col) += v(e.alpha, e.gamma) * e.amplitude;
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = c + 1; r < d; ++r) h(r, c) = h(c, r);
    }
    return h;
  }

 private:
  // Enumerates all vectors x with 0 <= x_i <= bound_i and Σ x_i = total.
  template <class Visit>
  static void for_each_bounded(std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& bound,
                               std::size_t pos, int total, Visit&& visit) {
    if (pos == x.size()) {
      if (total == 0) visit(x);
      return;
    }
    const int hi = std::min<int>(bound[pos], total);
    for (int v = hi; v >= 0; --v) {
      x[pos] = static_cast<std::uint8_t>(v);
      for_each_bounded(x, bound, pos + 1, total - v, visit);
    }
    x[pos] = 0;
  }

  static std::vector<int> labels_of(const std::vector<std::uint8_t>& x) {
    std::vector<int> labels;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int r = 0; r < x[i]; ++r) labels.push_back(static_cast<int>(i));
    }
    return labels;
  }

  void build() {
    const auto n = static_cast<std::size_t>(N_);
    const bool fermion = statistics_ == Statistics::Fermion;
    std::vector<std::uint8_t> annihilated(n), created(n), remainder(n), target(n);
    std::vector<std::uint8_t> create_bound(n);

    for (std::size_t a = 0; a < m_basis_.size(); ++a) {
      const auto& source = m_basis_[a].occupations;
      const std::uint64_t source_bits = fermion ? m_basis_[a].mask() : 0;

      for_each_bounded(annihilated, source, 0, k_, [&](const std::vector<std::uint8_t>& g) {
        const auto gamma = static_cast<std::uint32_t>(k_basis_.index_of(g));
        for (std::size_t i = 0; i < n; ++i) remainder[i] = static_cast<std::uint8_t>(source[i] - g[i]);
        const auto g_labels = labels_of(g);
        int ann_sign = 1;
        std::uint64_t rem_bits = 0;
        if (fermion) {
          ann_sign = detail::fermion_annihilation_sign(source_bits, g_labels);
          for (std::size_t i = 0; i < n; ++i) {
            if (remainder[i]) rem_bits |= std::uint64_t{1} << i;
          }
        }
        const double ann_weight = fermion ? 1.0 : detail::boson_half_weight(remainder, g);

        for (std::size_t i = 0; i < n; ++i) {
          create_bound[i] = fermion ? static_cast<std::uint8_t>(1 - remainder[i])
                                    : static_cast<std::uint8_t>(k_);
        }
        for_each_bounded(created, create_bound, 0, k_, [&](const std::vector<std::uint8_t>& c) {
          for (std::size_t i = 0; i < n; ++i) target[i] = static_cast<std::uint8_t>(remainder[i] + c[i]);
          const auto b = m_basis_.index_of(target);
          if (b > a) return;
          const auto alpha = static_cast<std::uint32_t>(k_basis_.index_of(c));
          double amp = 0.0;
          if (fermion) {
            amp = static_cast<double>(ann_sign *
                                      detail::fermion_creation_sign(rem_bits, labels_of(c)));
          } else {
            amp = std::sqrt(ann_weight * detail::boson_half_weight(remainder, c));
          }
          entries_.push_back(Entry{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(a),
                                   alpha, gamma, amp});
        });
      });
    }
  }

  Statistics statistics_;
  int N_, m_, k_;
  Basis m_basis_;
  Basis k_basis_;
  std::vector<Entry> entries_;
};

/// H(m)_{BA} = Σ_{αγ} V_{αγ} <B| A†_α A_γ |A>.
inline EmbeddedHamiltonian embed(const KBodyMatrix& kmat, const Embedder& embedder,
                                 const EnsembleSpec& spec) {
  return EmbeddedHamiltonian{embedder.apply(kmat.values), spec, kmat.member};
}

inline EmbeddedHamiltonian embed(const KBodyMatrix& kmat, const EnsembleSpec& spec) {
  spec.validate();
  const Embedder embedder(spec);
  return embed(kmat, embedder, spec);
}

}  // namespace egoe
