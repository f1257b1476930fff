#pragma once

// m-particle occupation-number bases for spinless fermions and bosons, and the
// matrix elements of A†_{k,α} A_{k,γ} between basis states.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoe/combinatorics.hpp"
#include "egoe/errors.hpp"

namespace egoe {

enum class Statistics { Fermion, Boson };

inline std::string_view to_string(Statistics s) {
  return s == Statistics::Fermion ? "fermion" : "boson";
}

inline Statistics parse_statistics(std::string_view text) {
  if (text == "fermion" || text == "Fermion" || text == "egoe" || text == "EGOE") {
    return Statistics::Fermion;
  }
  if (text == "boson" || text == "Boson" || text == "begoe" || text == "BEGOE") {
    return Statistics::Boson;
  }
  throw DomainError("unknown statistics '" + std::string(text) + "' (expected fermion|boson)");
}

inline constexpr std::uint64_t kDefaultDimensionCap = 2'000'000;

inline std::uint64_t dim_fermion(std::int64_t N, std::int64_t m) {
  if (N < 0 || m < 0 || m > N) {
    throw DomainError("dim_fermion: need 0 <= m <= N (N=" + std::to_string(N) +
                      ", m=" + std::to_string(m) + ")");
  }
  return binomial(N, m);
}

inline std::uint64_t dim_boson(std::int64_t N, std::int64_t m) {
  if (N < 0 || m < 0 || (N == 0 && m > 0)) {
    throw DomainError("dim_boson: need N >= 1 and m >= 0 (N=" + std::to_string(N) +
                      ", m=" + std::to_string(m) + ")");
  }
  if (m == 0) return 1;
  return binomial(N + m - 1, m);
}

inline std::uint64_t dimension(Statistics s, std::int64_t N, std::int64_t m) {
  return s == Statistics::Fermion ? dim_fermion(N, m) : dim_boson(N, m);
}

/// Number of independent k-body matrix elements, d(N,k)(d(N,k)+1)/2.
inline std::uint64_t kbme_count(std::int64_t N, std::int64_t k, Statistics s) {
  if (k < 1) throw DomainError("kbme_count: k must be >= 1");
  const std::uint64_t d = dimension(s, N, k);
  return d % 2 == 0 ? (d / 2) * (d + 1) : d * ((d + 1) / 2);
}

/// An m-particle basis state |m_1 m_2 ... m_N>.
struct OccupationConfig {
  Statistics statistics = Statistics::Fermion;
  std::vector<std::uint8_t> occupations;
  int total = 0;

  int num_states() const { return static_cast<int>(occupations.size()); }

  /// Bit i set iff state i is occupied. Fermions only, N <= 64.
  std::uint64_t mask() const {
    if (statistics != Statistics::Fermion) throw DomainError("mask() is defined for fermions only");
    if (occupations.size() > 64) throw DomainError("fermion masks support N <= 64");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < occupations.size(); ++i) {
      if (occupations[i]) bits |= std::uint64_t{1} << i;
    }
    return bits;
  }

  static OccupationConfig from_occupations(Statistics s, std::vector<std::uint8_t> occ) {
    int total = 0;
    for (auto o : occ) {
      if (s == Statistics::Fermion && o > 1) {
        throw DomainError("fermion occupations must be 0 or 1");
      }
      total += o;
    }
    return OccupationConfig{s, std::move(occ), total};
  }

  static OccupationConfig from_mask(int N, std::uint64_t bits) {
    if (N < 0 || N > 64) throw DomainError("fermion masks support N <= 64");
    if (N < 64 && (bits >> N) != 0) throw DomainError("mask has bits beyond N");
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) occ[static_cast<std::size_t>(i)] = (bits >> i) & 1U;
    return OccupationConfig{Statistics::Fermion, std::move(occ), std::popcount(bits)};
  }

  bool operator==(const OccupationConfig&) const = default;
};

/// Ket notation, e.g. "|110>" or "|2,0,1>" when any occupation exceeds 9.
inline std::string to_string(const OccupationConfig& c) {
  const bool wide = std::any_of(c.occupations.begin(), c.occupations.end(),
                                [](std::uint8_t o) { return o > 9; });
  std::string out = "|";
  for (std::size_t i = 0; i < c.occupations.size(); ++i) {
    if (wide && i > 0) out += ',';
    out += std::to_string(c.occupations[i]);
  }
  return out + ">";
}

/// A k-particle configuration given by its single-particle labels (0-based):
/// strictly increasing for fermions, non-decreasing for bosons.
struct KConfig {
  Statistics statistics = Statistics::Fermion;
  int num_states = 0;
  std::vector<int> labels;

  int rank() const { return static_cast<int>(labels.size()); }

  /// ν_i: how many times label i appears.
  std::vector<std::uint8_t> multiplicities() const {
    std::vector<std::uint8_t> nu(static_cast<std::size_t>(num_states), 0);
    for (int l : labels) ++nu[static_cast<std::size_t>(l)];
    return nu;
  }

  static KConfig from_labels(Statistics s, int N, std::vector<int> labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= N) throw DomainError("KConfig label out of range");
      if (i > 0) {
        const bool ok = s == Statistics::Fermion ? labels[i - 1] < labels[i]
                                                 : labels[i - 1] <= labels[i];
        if (!ok) {
          throw DomainError(s == Statistics::Fermion
                                ? "fermion KConfig labels must be strictly increasing"
                                : "boson KConfig labels must be non-decreasing");
        }
      }
    }
    return KConfig{s, N, std::move(labels)};
  }

  static KConfig from_occupation(const OccupationConfig& c) {
    std::vector<int> labels;
    for (int i = 0; i < c.num_states(); ++i) {
      for (int r = 0; r < c.occupations[static_cast<std::size_t>(i)]; ++r) labels.push_back(i);
    }
    return KConfig{c.statistics, c.num_states(), std::move(labels)};
  }
};

/// Ordered m-particle basis. Configurations are listed in decreasing
/// lexicographic order of their occupation vectors, so the lowest states are
/// filled first: for N=2, m=1 the order is |10>, |01>.
class Basis {
 public:
  Basis(Statistics s, int N, int m, std::uint64_t cap = kDefaultDimensionCap)
      : statistics_(s), num_states_(N), particles_(m) {
    if (s == Statistics::Boson && m > 255) throw DomainError("boson occupations limited to 255");
    if (s == Statistics::Fermion && N > 64) throw DomainError("fermion bases support N <= 64");
    const std::uint64_t d = dimension(s, N, m);
    if (d > cap) {
      throw CapacityError("basis dimension " + std::to_string(d) + " exceeds cap " +
                          std::to_string(cap) + " (" + std::string(to_string(s)) +
                          ", N=" + std::to_string(N) + ", m=" + std::to_string(m) + ")");
    }
    build_count_table();
    configs_.reserve(static_cast<std::size_t>(d));
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(N), 0);
    fill(occ, 0, m);
  }

  Statistics statistics() const { return statistics_; }
  int num_states() const { return num_states_; }
  int particles() const { return particles_; }
  std::size_t size() const { return configs_.size(); }
  const OccupationConfig& operator[](std::size_t i) const { return configs_[i]; }
  const std::vector<OccupationConfig>& configs() const { return configs_; }

  /// Position of an occupation vector in this basis (combinatorial rank, O(N)).
  std::size_t index_of(std::span<const std::uint8_t> occ) const {
    if (static_cast<int>(occ.size()) != num_states_) {
      throw DomainError("index_of: occupation vector has wrong length");
    }
    std::uint64_t index = 0;
    int remaining = particles_;
    for (int i = 0; i < num_states_; ++i) {
      const int o = occ[static_cast<std::size_t>(i)];
      const int vmax = statistics_ == Statistics::Fermion ? std::min(1, remaining) : remaining;
      if (o > vmax) throw DomainError("index_of: configuration not in basis");
      for (int v = o + 1; v <= vmax; ++v) index += count(num_states_ - i - 1, remaining - v);
      remaining -= o;
    }
    if (remaining != 0) throw DomainError("index_of: particle number mismatch");
    return static_cast<std::size_t>(index);
  }

  std::size_t index_of(const OccupationConfig& c) const {
    if (c.statistics != statistics_) throw DomainError("index_of: statistics mismatch");
    return index_of(std::span<const std::uint8_t>(c.occupations));
  }

 private:
  // Number of configurations of `p` particles in the trailing `modes` states.
  std::uint64_t count(int modes, int p) const {
    return counts_[static_cast<std::size_t>(modes) * static_cast<std::size_t>(particles_ + 1) +
                   static_cast<std::size_t>(p)];
  }

  void build_count_table() {
    counts_.assign(static_cast<std::size_t>(num_states_ + 1) * static_cast<std::size_t>(particles_ + 1), 0);
    for (int modes = 0; modes <= num_states_; ++modes) {
      for (int p = 0; p <= particles_; ++p) {
        std::uint64_t c = 0;
        if (statistics_ == Statistics::Fermion) {
          c = p <= modes ? binomial(modes, p) : 0;
        } else {
          c = modes == 0 ? (p == 0 ? 1 : 0) : binomial(modes + p - 1, p);
        }
        counts_[static_cast<std::size_t>(modes) * static_cast<std::size_t>(particles_ + 1) +
                static_cast<std::size_t>(p)] = c;
      }
    }
  }

  void fill(std::vector<std::uint8_t>& occ, int pos, int remaining) {
    if (pos == num_states_) {
      if (remaining == 0) configs_.push_back(OccupationConfig{statistics_, occ, particles_});
      return;
    }
    const int vmax = statistics_ == Statistics::Fermion ? std::min(1, remaining) : remaining;
    for (int v = vmax; v >= 0; --v) {
      if (count(num_states_ - pos - 1, remaining - v) == 0) continue;
      occ[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
      fill(occ, pos + 1, remaining - v);
    }
    occ[static_cast<std::size_t>(pos)] = 0;
  }

  Statistics statistics_;
  int num_states_;
  int particles_;
  std::vector<std::uint64_t> counts_;
  std::vector<OccupationConfig> configs_;
};

inline std::vector<OccupationConfig> enumerate_basis(int N, int m, Statistics s,
                                                     std::uint64_t cap = kDefaultDimensionCap) {
  return Basis(s, N, m, cap).configs();
}

namespace detail {

inline double falling_product(int top, int count) {
  double p = 1.0;
  for (int j = 0; j < count; ++j) p *= static_cast<double>(top - j);
  return p;
}

inline double factorial(int n) { return falling_product(n, n); }

/// Π_i [(r_i + c_i)! / r_i!] / Π_i c_i!  — the squared amplitude of adding the
/// normalized k-boson state `c` to the remainder `r` (equivalently, of removing
/// it from r + c).
inline double boson_half_weight(std::span<const std::uint8_t> remainder,
                                std::span<const std::uint8_t> moved) {
  double num = 1.0;
  double den = 1.0;
  for (std::size_t i = 0; i < remainder.size(); ++i) {
    const int c = moved[i];
    if (c == 0) continue;
    num *= falling_product(remainder[i] + c, c);
    den *= factorial(c);
  }
  return num / den;
}

/// Sign of removing `labels` (any order given; applied highest first) from `bits`.
/// Each annihilation contributes (-1)^(occupied states below the label).
inline int fermion_annihilation_sign(std::uint64_t bits, std::span<const int> labels) {
  int parity = 0;
  for (int l : labels) {
    // Higher labels are removed first, so the states below l are untouched.
    parity += std::popcount(bits & ((std::uint64_t{1} << l) - 1));
  }
  return (parity & 1) ? -1 : 1;
}

/// Sign of adding strictly increasing `labels` to `bits`, lowest first.
inline int fermion_creation_sign(std::uint64_t bits, std::span<const int> labels) {
  int parity = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    parity += std::popcount(bits & ((std::uint64_t{1} << labels[j]) - 1)) + static_cast<int>(j);
  }
  return (parity & 1) ? -1 : 1;
}

}  // namespace detail

struct Transition {
  double amplitude = 0.0;
  OccupationConfig target;
};

/// <target| A†_create A_annihilate |source>, or nullopt when the result vanishes.
///
/// Fermions: A_annihilate removes labels in decreasing order, A†_create adds them
/// in increasing order, each step contributing (-1)^(occupied states with a
/// smaller label). Bosons: normalized k-particle states, so the amplitude is
/// sqrt(Π s!/(s-a)! / Π a!) * sqrt(Π (r+c)!/r! / Π c!) with r = s - a.
inline std::optional<Transition> transition_amplitude(const OccupationConfig& source,
                                                      const KConfig& create,
                                                      const KConfig& annihilate) {
  if (create.statistics != source.statistics || annihilate.statistics != source.statistics) {
    throw DomainError("transition_amplitude: mismatched statistics");
  }
  if (create.num_states != source.num_states() || annihilate.num_states != source.num_states()) {
    throw DomainError("transition_amplitude: mismatched number of single-particle states");
  }
  if (create.rank() != annihilate.rank()) {
    throw DomainError("transition_amplitude: create and annihilate ranks differ");
  }
  const int N = source.num_states();

  if (source.statistics == Statistics::Fermion) {
    const std::uint64_t s = source.mask();
    std::uint64_t ann = 0;
    for (int l : annihilate.labels) ann |= std::uint64_t{1} << l;
    if ((s & ann) != ann) return std::nullopt;
    const std::uint64_t r = s & ~ann;
    std::uint64_t cr = 0;
    for (int l : create.labels) cr |= std::uint64_t{1} << l;
    if ((r & cr) != 0) return std::nullopt;
    const int sign = detail::fermion_annihilation_sign(s, annihilate.labels) *
                     detail::fermion_creation_sign(r, create.labels);
    return Transition{static_cast<double>(sign), OccupationConfig::from_mask(N, r | cr)};
  }

  const auto a = annihilate.multiplicities();
  const auto c = create.multiplicities();
  std::vector<std::uint8_t> r(source.occupations);
  for (int i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (r[idx] < a[idx]) return std::nullopt;
    r[idx] = static_cast<std::uint8_t>(r[idx] - a[idx]);
  }
  const double weight = detail::boson_half_weight(r, a) * detail::boson_half_weight(r, c);
  std::vector<std::uint8_t> target(r);
  for (int i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (r[idx] + c[idx] > 255) throw DomainError("boson occupation overflow");
    target[idx] = static_cast<std::uint8_t>(r[idx] + c[idx]);
  }
  return Transition{std::sqrt(weight),
                    OccupationConfig::from_occupations(Statistics::Boson, std::move(target))};
}

}  // namespace egoe
