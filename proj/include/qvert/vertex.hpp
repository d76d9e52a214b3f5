#ifndef QVERT_VERTEX_HPP
#define QVERT_VERTEX_HPP

/*
 * Vertex reconstruction.  A complete type vector tau pins the coordinates it
 * declares zero; an admissible vertex of the projective solution space is
 * the unique solution of
 *
 *     mat * x = 0,   sum_i x_i = 1,   x_j = 0 for every pinned j,
 *
 * solved here exactly over the rationals (fraction-free elimination plus
 * rational back-substitution).  Solutions are reported as the smallest
 * integer multiple u of x: clear denominators, divide by the gcd.
 */

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvert/arith.hpp"
#include "qvert/bareiss.hpp"
#include "qvert/problem.hpp"
#include "qvert/typevec.hpp"

namespace qvert {

struct VertexSolution {
  TypeVector tau;
  BigVector u;  ///< smallest non-negative integer representative, gcd 1

  /// The projective representative: x = u / sum(u), so sum_i x_i = 1.
  RationalVector x() const {
    BigInt total = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) total += u(i);
    RationalVector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      out(i) = BigRational(u(i), total);
    }
    return out;
  }
};

/// Scales a non-negative rational vector to its smallest integer multiple.
inline BigVector smallest_integer_multiple(const RationalVector& x) {
  BigInt scale = 1;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(x(i)));
  }
  BigVector u(x.size());
  BigInt g = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    u(i) = boost::multiprecision::numerator(x(i)) *
           (scale / boost::multiprecision::denominator(x(i)));
    g = boost::multiprecision::gcd(g, u(i));
  }
  if (g > 1) {
    for (Eigen::Index i = 0; i < x.size(); ++i) u(i) /= g;
  }
  return u;
}

/// Reconstructs the vertex pinned by a complete type vector.  The caller
/// asserts that tau was emitted by the traversal, so the pinned system must
/// have a unique, non-negative solution of exactly this type; any other
/// outcome is an internal error.
inline VertexSolution reconstruct_vertex(const TypeVector& tau,
                                         const ProblemInstance& inst) {
  if (static_cast<Eigen::Index>(tau.size()) != inst.tets) {
    throw std::invalid_argument("type vector length does not match the instance");
  }
  const ConstraintSet cs = type_constraints(PartialTypeVector(tau));
  const auto& support = cs.lower_bounded;
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());

  BigMatrix a(inst.rows() + 1, s);
  BigVector rhs = BigVector::Zero(inst.rows() + 1);
  for (Eigen::Index r = 0; r < inst.rows(); ++r) {
    for (Eigen::Index c = 0; c < s; ++c) {
      a(r, c) = BigInt(inst.mat(r, support[static_cast<std::size_t>(c)]));
    }
  }
  for (Eigen::Index c = 0; c < s; ++c) a(inst.rows(), c) = 1;
  rhs(inst.rows()) = 1;

  const LinearSolveResult solved = solve_linear_system(std::move(a), std::move(rhs));
  if (solved.status != SolveStatus::kUnique) {
    throw InternalError("pinned system for an emitted type vector is not uniquely solvable");
  }

  RationalVector x = RationalVector::Zero(3 * inst.tets);
  for (Eigen::Index c = 0; c < s; ++c) {
    if (solved.solution(c) <= 0) {
      throw InternalError("pinned system solution leaves the cone");
    }
    x(support[static_cast<std::size_t>(c)]) = solved.solution(c);
  }
  if (!(type_vector_of(x) == tau)) {
    throw InternalError("reconstructed vertex does not realize its type vector");
  }

  VertexSolution out;
  out.tau = tau;
  out.u = smallest_integer_multiple(x);
  return out;
}

/// Full validation of an emitted solution against the original instance:
/// non-negative, gcd 1, in the kernel of mat, quadrilateral-compatible with
/// tau, and inside the coordinate bound.  Throws InternalError on violation.
inline void validate_solution(const VertexSolution& sol,
                              const ProblemInstance& inst,
                              const CoordinateBound& bound) {
  if (sol.u.size() != 3 * inst.tets) {
    throw InternalError("solution vector has the wrong length");
  }
  BigInt g = 0;
  for (Eigen::Index i = 0; i < sol.u.size(); ++i) {
    if (sol.u(i) < 0) throw InternalError("solution coordinate is negative");
    if (sol.u(i) > bound.per_coordinate) {
      throw InternalError("solution coordinate exceeds the a-priori bound");
    }
    g = boost::multiprecision::gcd(g, sol.u(i));
  }
  if (g != 1) throw InternalError("solution coordinates are not coprime");
  for (Eigen::Index r = 0; r < inst.rows(); ++r) {
    BigInt acc = 0;
    for (Eigen::Index c = 0; c < inst.cols(); ++c) {
      if (sol.u(c) != 0) acc += BigInt(inst.mat(r, c)) * sol.u(c);
    }
    if (acc != 0) throw InternalError("solution is not in the kernel of the matrix");
  }
  if (!(type_vector_of(sol.u) == sol.tau)) {
    throw InternalError("solution does not realize its type vector");
  }
}

/// One line per solution: the type vector as digits, then the coordinates.
inline std::string to_line(const VertexSolution& sol) {
  std::string out = to_string(sol.tau) + " :";
  for (Eigen::Index i = 0; i < sol.u.size(); ++i) {
    out += ' ';
    out += sol.u(i).str();
  }
  return out;
}

inline VertexSolution parse_solution_line(const std::string& line) {
  const std::size_t sep = line.find(" : ");
  if (sep == std::string::npos) {
    throw std::invalid_argument("solution line lacks the ' : ' separator");
  }
  VertexSolution out;
  out.tau = parse_type_vector(line.substr(0, sep));
  std::vector<BigInt> coords;
  std::size_t i = sep + 3;
  while (i < line.size()) {
    std::size_t j = line.find(' ', i);
    if (j == std::string::npos) j = line.size();
    coords.emplace_back(line.substr(i, j - i));
    i = j + 1;
  }
  if (coords.size() != 3 * out.tau.size()) {
    throw std::invalid_argument("solution line has the wrong coordinate count");
  }
  out.u.resize(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t c = 0; c < coords.size(); ++c) {
    out.u(static_cast<Eigen::Index>(c)) = coords[c];
  }
  return out;
}

/// Canonical presentation: one line per solution, sorted lexicographically
/// by the type vector string, each line terminated by '\n'.
inline std::string canonical_text(std::vector<VertexSolution> sols) {
  std::sort(sols.begin(), sols.end(),
            [](const VertexSolution& a, const VertexSolution& b) {
              return a.tau < b.tau;
            });
  std::string out;
  for (const VertexSolution& s : sols) {
    out += to_line(s);
    out += '\n';
  }
  return out;
}

}  // namespace qvert

#endif  // QVERT_VERTEX_HPP
