#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "egoe/errors.hpp"

namespace egoe {

/// Exact binomial coefficient C(n, k). Returns 0 for k > n.
/// Throws CapacityError if the result does not fit in 64 bits.
inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) {
    throw DomainError("binomial: negative argument (n=" + std::to_string(n) +
                      ", k=" + std::to_string(k) + ")");
  }
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // result * (n-k+i) / i is exact at every step: it equals C(n-k+i, i).
    result = result * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw CapacityError("binomial: C(" + std::to_string(n) + ", " + std::to_string(k) +
                          ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

inline double binomial_real(std::int64_t n, std::int64_t k) {
  return static_cast<double>(binomial(n, k));
}

}  // namespace egoe
