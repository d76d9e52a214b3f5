#ifndef QVERT_ORACLE_HPP
#define QVERT_ORACLE_HPP

/*
 * Brute-force reference implementations used to validate the enumeration
 * core.  Everything here is deliberately independent of the production
 * algorithms: linear systems are solved by plain rational Gauss-Jordan
 * elimination (bareiss.hpp uses fraction-free integer elimination, the
 * traversal uses revised-simplex pivoting), admissibility is decided
 * directly from the vertex characterization instead of tree pruning, and
 * LP feasibility is decided by enumerating candidate basic solutions.
 * Exponential cost is acceptable: these run on small instances in tests.
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvert/arith.hpp"
#include "qvert/problem.hpp"
#include "qvert/typevec.hpp"
#include "qvert/vertex.hpp"

namespace qvert {

using RationalMatrix =
    Eigen::Matrix<BigRational, Eigen::Dynamic, Eigen::Dynamic>;

enum class OracleOutcome { kUnique, kNoSolution, kUnderdetermined };

struct OracleSolve {
  OracleOutcome outcome = OracleOutcome::kNoSolution;
  RationalVector x;  ///< meaningful only for kUnique
};

/// Solves a * x = b over the rationals by Gauss-Jordan elimination with
/// first-non-zero pivoting, classifying the system as uniquely solvable,
/// inconsistent, or underdetermined.
inline OracleSolve exact_solve(RationalMatrix a, RationalVector b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("exact_solve: shape mismatch");
  }
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  std::vector<Eigen::Index> pivot_row(static_cast<std::size_t>(cols), -1);
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index p = -1;
    for (Eigen::Index r = rank; r < rows; ++r) {
      if (a(r, c) != 0) {
        p = r;
        break;
      }
    }
    if (p < 0) continue;
    if (p != rank) {
      a.row(p).swap(a.row(rank));
      std::swap(b(p), b(rank));
    }
    const BigRational inv = BigRational(1) / a(rank, c);
    for (Eigen::Index j = c; j < cols; ++j) a(rank, j) *= inv;
    b(rank) *= inv;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == rank || a(r, c) == 0) continue;
      const BigRational factor = a(r, c);
      for (Eigen::Index j = c; j < cols; ++j) {
        a(r, j) -= factor * a(rank, j);
      }
      b(r) -= factor * b(rank);
    }
    pivot_row[static_cast<std::size_t>(c)] = rank;
    ++rank;
  }

  OracleSolve out;
  for (Eigen::Index r = rank; r < rows; ++r) {
    if (b(r) != 0) {
      out.outcome = OracleOutcome::kNoSolution;
      return out;
    }
  }
  if (rank < cols) {
    out.outcome = OracleOutcome::kUnderdetermined;
    return out;
  }
  out.outcome = OracleOutcome::kUnique;
  out.x = RationalVector::Zero(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    out.x(c) = b(pivot_row[static_cast<std::size_t>(c)]);
  }
  return out;
}

/// Why a candidate type vector was rejected (or that it was accepted).
enum class TypeDiagnosis {
  kAccepted,         ///< unique solution, strictly positive on the support
  kNoSolution,       ///< pinned system is inconsistent
  kUnderdetermined,  ///< pinned system has a solution line: not a vertex
  kSignViolation,    ///< unique solution leaves the non-negative cone
  kTypeMismatch      ///< unique solution vanishes somewhere on the support
};

inline const char* to_string(TypeDiagnosis d) {
  switch (d) {
    case TypeDiagnosis::kAccepted: return "accepted";
    case TypeDiagnosis::kNoSolution: return "no-solution";
    case TypeDiagnosis::kUnderdetermined: return "underdetermined";
    case TypeDiagnosis::kSignViolation: return "sign-violation";
    case TypeDiagnosis::kTypeMismatch: return "type-mismatch";
  }
  return "?";
}

struct BruteForceEntry {
  TypeVector tau;
  TypeDiagnosis diagnosis;
};

struct BruteForceResult {
  std::vector<VertexSolution> solutions;
  std::vector<BruteForceEntry> entries;  ///< one per non-zero type vector
};

namespace oracle_detail {

/// The oracle's own integer scaling: clear denominators, divide by the gcd.
inline BigVector scale_to_integers(const RationalVector& x) {
  BigInt denom_lcm = 1;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    denom_lcm = boost::multiprecision::lcm(
        denom_lcm, boost::multiprecision::denominator(x(i)));
  }
  BigVector u(x.size());
  BigInt g = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    u(i) = boost::multiprecision::numerator(x(i)) *
           (denom_lcm / boost::multiprecision::denominator(x(i)));
    g = boost::multiprecision::gcd(g, u(i));
  }
  if (g > 1) {
    for (Eigen::Index i = 0; i < x.size(); ++i) u(i) /= g;
  }
  return u;
}

}  // namespace oracle_detail

/// Enumerates every admissible vertex by direct application of the vertex
/// characterization: a non-zero type vector tau is the type of an admissible
/// vertex iff the system
///
///     mat * x = 0,  sum over the support = 1,  x = 0 off the support
///
/// has a unique solution that is strictly positive on the support.  All
/// 4^n - 1 candidates are tried; `cap` guards against accidental blow-up.
inline BruteForceResult brute_force_enumerate(const ProblemInstance& inst,
                                              int cap = 7) {
  if (inst.tets > cap) {
    throw std::invalid_argument(
        "brute_force_enumerate: instance exceeds the size cap");
  }
  const Eigen::Index n = inst.tets;
  BruteForceResult out;

  std::uint64_t total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 4;
  for (std::uint64_t code = 1; code < total; ++code) {
    std::vector<Symbol> symbols(static_cast<std::size_t>(n));
    std::uint64_t rest = code;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      symbols[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % 4);
      rest /= 4;
    }
    TypeVector tau{std::move(symbols)};

    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (tau[static_cast<std::size_t>(i)] != 0) {
        support.push_back(3 * i + tau[static_cast<std::size_t>(i)] - 1);
      }
    }
    const Eigen::Index s = static_cast<Eigen::Index>(support.size());

    RationalMatrix a = RationalMatrix::Zero(inst.rows() + 1, s);
    RationalVector b = RationalVector::Zero(inst.rows() + 1);
    for (Eigen::Index r = 0; r < inst.rows(); ++r) {
      for (Eigen::Index c = 0; c < s; ++c) {
        a(r, c) = BigRational(inst.mat(r, support[static_cast<std::size_t>(c)]));
      }
    }
    for (Eigen::Index c = 0; c < s; ++c) a(inst.rows(), c) = 1;
    b(inst.rows()) = 1;

    const OracleSolve solved = exact_solve(std::move(a), std::move(b));
    TypeDiagnosis diag = TypeDiagnosis::kAccepted;
    if (solved.outcome == OracleOutcome::kNoSolution) {
      diag = TypeDiagnosis::kNoSolution;
    } else if (solved.outcome == OracleOutcome::kUnderdetermined) {
      diag = TypeDiagnosis::kUnderdetermined;
    } else {
      for (Eigen::Index c = 0; c < s; ++c) {
        if (solved.x(c) < 0) {
          diag = TypeDiagnosis::kSignViolation;
          break;
        }
        if (solved.x(c) == 0) diag = TypeDiagnosis::kTypeMismatch;
      }
    }
    out.entries.push_back(BruteForceEntry{tau, diag});
    if (diag != TypeDiagnosis::kAccepted) continue;

    RationalVector x = RationalVector::Zero(3 * n);
    for (Eigen::Index c = 0; c < s; ++c) {
      x(support[static_cast<std::size_t>(c)]) = solved.x(c);
    }
    VertexSolution sol;
    sol.tau = tau;
    sol.u = oracle_detail::scale_to_integers(x);
    out.solutions.push_back(std::move(sol));
  }
  return out;
}

/// LP feasibility reference: decides whether  a * x = b  admits x >= 0
/// supported on the active columns, by testing every candidate basic
/// solution (subsets of active columns up to the row count; if the system is
/// feasible at all, some solution with linearly independent support exists,
/// and that subset's unique coefficients are non-negative).
inline bool feasible_by_enumeration(const IntMatrix& a, const RationalVector& b,
                                    const std::vector<char>& active) {
  if (static_cast<Eigen::Index>(active.size()) != a.cols()) {
    throw std::invalid_argument("feasible_by_enumeration: mask mismatch");
  }
  if (b.size() != a.rows()) {
    throw std::invalid_argument("feasible_by_enumeration: shape mismatch");
  }
  bool zero_rhs = true;
  for (Eigen::Index r = 0; r < b.size(); ++r) {
    if (b(r) != 0) {
      zero_rhs = false;
      break;
    }
  }
  if (zero_rhs) return true;  // x = 0

  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (active[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  const Eigen::Index m = static_cast<Eigen::Index>(cols.size());
  const Eigen::Index max_size = std::min<Eigen::Index>(m, a.rows());

  std::vector<Eigen::Index> pick;
  for (Eigen::Index size = 1; size <= max_size; ++size) {
    pick.assign(static_cast<std::size_t>(size), 0);
    for (Eigen::Index i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      RationalMatrix sub = RationalMatrix::Zero(a.rows(), size);
      for (Eigen::Index c = 0; c < size; ++c) {
        const Eigen::Index col = cols[static_cast<std::size_t>(
            pick[static_cast<std::size_t>(c)])];
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          sub(r, c) = BigRational(a(r, col));
        }
      }
      const OracleSolve solved = exact_solve(std::move(sub), b);
      if (solved.outcome == OracleOutcome::kUnique) {
        bool nonneg = true;
        for (Eigen::Index c = 0; c < size; ++c) {
          if (solved.x(c) < 0) {
            nonneg = false;
            break;
          }
        }
        if (nonneg) return true;
      }
      // next size-combination of {0,...,m-1} in lexicographic order
      Eigen::Index i = size - 1;
      while (i >= 0 &&
             pick[static_cast<std::size_t>(i)] == m - size + i) {
        --i;
      }
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < size; ++j) {
        pick[static_cast<std::size_t>(j)] =
            pick[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return false;
}

}  // namespace qvert

#endif  // QVERT_ORACLE_HPP
