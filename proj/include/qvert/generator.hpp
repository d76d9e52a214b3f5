#ifndef QVERT_GENERATOR_HPP
#define QVERT_GENERATOR_HPP

/*
 * Random instance generation for tests and benchmarks.  Generated matrices
 * follow the sparsity profile of matching-equation systems: every column has
 * at most three non-zero entries whose magnitudes sum to at most 4, and in
 * orientable mode every magnitude is 1 or 2.
 *
 * Randomness is a fixed mt19937_64 stream combined with rejection-sampled
 * bounded draws, so a (n, seed, options) triple yields the same instance on
 * every platform and standard library.
 */

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "qvert/problem.hpp"

namespace qvert {

/// Uniform bounded draws on top of mt19937_64 with explicit rejection
/// sampling (std::uniform_int_distribution is not portable across standard
/// libraries).
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw from {0, ..., n-1}.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("bounded(0)");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (kMax % n + 1) % n;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (rem != 0 && x > kMax - rem) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

struct GeneratorOptions {
  Eigen::Index rows = -1;   ///< equation count; -1 draws uniformly from [1, 2n]
  bool orientable = false;  ///< restrict magnitudes to {1, 2}, set the flag
};

/// Generates a random matching-equation instance with n coordinate triples.
inline ProblemInstance random_sparse_instance(Eigen::Index n,
                                              std::uint64_t seed,
                                              GeneratorOptions opts = {}) {
  if (n < 1) throw std::invalid_argument("instance needs at least one triple");
  DeterministicRng rng(seed);
  const Eigen::Index e =
      opts.rows >= 0 ? opts.rows
                     : 1 + static_cast<Eigen::Index>(
                               rng.bounded(static_cast<std::uint64_t>(2 * n)));

  ProblemInstance inst;
  inst.tets = n;
  inst.orientable = opts.orientable ? Orientability::kYes : Orientability::kNo;
  inst.mat = IntMatrix::Zero(e, 3 * n);

  const std::int64_t cap = opts.orientable ? 2 : 4;
  std::vector<Eigen::Index> row_pool(static_cast<std::size_t>(e));
  for (Eigen::Index r = 0; r < e; ++r) row_pool[static_cast<std::size_t>(r)] = r;

  for (Eigen::Index j = 0; j < 3 * n; ++j) {
    Eigen::Index nz = static_cast<Eigen::Index>(rng.bounded(4));  // 0..3
    nz = std::min(nz, e);
    if (nz == 0) continue;
    // Distinct rows via a partial Fisher-Yates pass over the pool.
    for (Eigen::Index i = 0; i < nz; ++i) {
      const Eigen::Index pick =
          i + static_cast<Eigen::Index>(
                  rng.bounded(static_cast<std::uint64_t>(e - i)));
      std::swap(row_pool[static_cast<std::size_t>(i)],
                row_pool[static_cast<std::size_t>(pick)]);
    }
    // Magnitudes: at least 1 each, column total at most 4.
    std::int64_t budget = 4;
    for (Eigen::Index i = 0; i < nz; ++i) {
      const std::int64_t reserve = nz - 1 - i;  // keep 1 for each later entry
      const std::int64_t avail = std::min<std::int64_t>(budget - reserve, cap);
      const std::int64_t mag =
          1 + static_cast<std::int64_t>(
                  rng.bounded(static_cast<std::uint64_t>(avail)));
      budget -= mag;
      const std::int64_t sign = rng.bounded(2) == 0 ? 1 : -1;
      inst.mat(row_pool[static_cast<std::size_t>(i)], j) = sign * mag;
    }
  }
  return inst;
}

}  // namespace qvert

#endif  // QVERT_GENERATOR_HPP
