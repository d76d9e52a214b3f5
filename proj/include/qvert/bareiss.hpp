#ifndef QVERT_BAREISS_HPP
#define QVERT_BAREISS_HPP

/*
 * Fraction-free (Bareiss) elimination over arbitrary-precision integers.
 *
 * One-step Bareiss keeps every intermediate entry equal to a minor of the
 * input matrix: the update
 *
 *     A(i,j) <- (A(p,c) * A(i,j) - A(i,c) * A(p,j)) / prev
 *
 * divides exactly by the previous pivot, so all arithmetic stays in the
 * integers and entry growth is polynomial.  Used for rank computation and
 * for the exact solve behind vertex reconstruction.
 */

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qvert/arith.hpp"

namespace qvert {

using BigMatrix = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;
using BigVector = Eigen::Matrix<BigInt, Eigen::Dynamic, 1>;
using RationalVector = Eigen::Matrix<BigRational, Eigen::Dynamic, 1>;

enum class SolveStatus { kUnique, kInconsistent, kUnderdetermined };

struct LinearSolveResult {
  SolveStatus status = SolveStatus::kInconsistent;
  RationalVector solution;  ///< populated only when status == kUnique
};

namespace detail {

/// Reduces (A | rhs) in place to row echelon form, fraction-free.  Returns
/// the list of (pivot row, pivot column) pairs in elimination order.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> bareiss_echelon(
    BigMatrix& a, BigVector* rhs) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pivots;
  BigInt prev = 1;
  Eigen::Index next_row = 0;
  for (Eigen::Index c = 0; c < cols && next_row < rows; ++c) {
    Eigen::Index p = next_row;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != next_row) {
      a.row(p).swap(a.row(next_row));
      if (rhs) std::swap((*rhs)(p), (*rhs)(next_row));
    }
    const BigInt pivot = a(next_row, c);
    for (Eigen::Index i = next_row + 1; i < rows; ++i) {
      const BigInt factor = a(i, c);
      for (Eigen::Index j = c + 1; j < cols; ++j) {
        a(i, j) = (pivot * a(i, j) - factor * a(next_row, j)) / prev;
      }
      if (rhs) (*rhs)(i) = (pivot * (*rhs)(i) - factor * (*rhs)(next_row)) / prev;
      a(i, c) = 0;
    }
    prev = pivot;
    pivots.emplace_back(next_row, c);
    ++next_row;
  }
  return pivots;
}

}  // namespace detail

/// Rank of an integer matrix, computed exactly.
inline Eigen::Index bareiss_rank(BigMatrix a) {
  return static_cast<Eigen::Index>(detail::bareiss_echelon(a, nullptr).size());
}

/// Solves A x = rhs exactly and classifies the solution set.
inline LinearSolveResult solve_linear_system(BigMatrix a, BigVector rhs) {
  if (a.rows() != rhs.size()) {
    throw std::invalid_argument("solve_linear_system: shape mismatch");
  }
  const Eigen::Index cols = a.cols();
  const auto pivots = detail::bareiss_echelon(a, &rhs);

  LinearSolveResult out;
  for (Eigen::Index i = static_cast<Eigen::Index>(pivots.size()); i < a.rows(); ++i) {
    if (rhs(i) != 0) {
      out.status = SolveStatus::kInconsistent;
      return out;
    }
  }
  if (static_cast<Eigen::Index>(pivots.size()) < cols) {
    out.status = SolveStatus::kUnderdetermined;
    return out;
  }

  // Full column rank: back-substitute from the last pivot upwards.
  out.status = SolveStatus::kUnique;
  out.solution = RationalVector::Zero(cols);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const auto [r, c] = *it;
    BigRational acc(rhs(r));
    for (Eigen::Index j = c + 1; j < cols; ++j) {
      if (a(r, j) != 0) acc -= BigRational(a(r, j)) * out.solution(j);
    }
    out.solution(c) = acc / BigRational(a(r, c));
  }
  return out;
}

}  // namespace qvert

#endif  // QVERT_BAREISS_HPP
