#ifndef QVERT_TABLEAU_HPP
#define QVERT_TABLEAU_HPP

/*
 * Integer-preserving revised simplex state for systems  mat * x = b, x >= 0
 * over the column-reduced full-rank matrix `mat` of a ReducedSystem.
 *
 * The state is an ordered basis beta of k columns together with an integer
 * matrix N and a positive integer Delta satisfying
 *
 *     N * mat[:, beta] = Delta * I.
 *
 * Every entry of N and Delta itself is a k x k minor of `mat` (up to sign),
 * so by Hadamard's inequality both are bounded by delta, the product of the
 * k largest column norms.  Pivots update N with the fraction-free rule
 *
 *     N'(i,:) = (alpha * N(i,:) - u_i * N(r,:)) / Delta,   N'(r,:) = N(r,:),
 *
 * where u = N * mat[:, q] and alpha = u_r; the division is exact and every
 * intermediate product is bounded by 2 * delta^2.
 *
 * Type constraints enter incrementally: fixing x_j >= 1 substitutes
 * x_j = x_j' + 1, i.e. b -= mat[:, j]; fixing x_j = 0 removes column j from
 * the active set, pivoting j out of the basis first if needed.  Feasibility
 * is restored by dual simplex steps with Bland's smallest-index rule.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "qvert/arith.hpp"
#include "qvert/problem.hpp"
#include "qvert/typevec.hpp"

namespace qvert {

enum class Feasibility { kFeasible, kInfeasible };

/// Optional run-wide instrumentation, shared by all tableaux of a traversal.
struct TableauChecks {
  bool verify_invariants = false;  ///< verify N * mat_beta = Delta * I and the
                                   ///< delta bounds after every pivot
  bool track_bases = false;  ///< assert that no basis repeats within a single
                             ///< make_feasible call
  std::atomic<std::uint64_t> pivots{0};
  std::atomic<std::uint64_t> verified_pivots{0};
};

/// Basic solution of the current system: x_j = numerators[j] / denominator
/// (zero outside the basis).
struct BasicSolution {
  BigVector numerators;
  BigInt denominator;
};

template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using W = Wide<Scalar>;

  const ReducedSystem& system() const { return *sys_; }
  const Scalar& denominator() const { return denom_; }
  const Matrix& inverse_numerator() const { return inv_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const Vector& rhs() const { return rhs_; }
  bool is_active(Eigen::Index j) const {
    return active_[static_cast<std::size_t>(j)] != 0;
  }
  const Scalar& max_entry_seen() const { return max_entry_; }

  /// Requires x_j >= 1 for an active column j via the substitution
  /// x_j = x_j' + 1, which only shifts the right-hand side.
  void add_nonzero_constraint(Eigen::Index j) {
    if (!is_active(j)) {
      throw InternalError("add_nonzero_constraint on an eliminated column");
    }
    for (Eigen::Index i = 0; i < k_; ++i) {
      rhs_(i) -= Scalar(sys_->mat(i, j));
    }
  }

  /// Fixes x_j = 0 and removes column j from the active set.  If j sits in
  /// the basis it is pivoted out through any active column with a non-zero
  /// entry in its row (smallest index).  When no such column exists the row
  /// pins x_j to a constant z: z != 0 is an infeasibility proof, z == 0 means
  /// the constraint already holds and the row stays permanently zero.
  Feasibility enforce_zero(Eigen::Index j) {
    if (!is_active(j)) {
      throw InternalError("enforce_zero on an eliminated column");
    }
    const Eigen::Index r = basis_pos_[static_cast<std::size_t>(j)];
    if (r < 0) {
      active_[static_cast<std::size_t>(j)] = 0;
      return Feasibility::kFeasible;
    }
    for (Eigen::Index q = 0; q < cols_; ++q) {
      if (!is_active(q) || basis_pos_[static_cast<std::size_t>(q)] >= 0) continue;
      if (row_column_product(r, q) != 0) {
        pivot(r, q);
        active_[static_cast<std::size_t>(j)] = 0;
        return Feasibility::kFeasible;
      }
    }
    if (row_rhs_product(r) != 0) return Feasibility::kInfeasible;
    active_[static_cast<std::size_t>(j)] = 0;
    return Feasibility::kFeasible;
  }

  /// Dual simplex with Bland's rule: while some basic variable is negative,
  /// pick the one with the smallest column index, then enter the smallest
  /// active column with a negative coefficient in its row.  A negative row
  /// without such a column proves infeasibility.
  Feasibility make_feasible() {
    std::set<std::vector<Eigen::Index>> seen;
    for (std::uint64_t iter = 0;; ++iter) {
      if (iter > kPivotLimit) {
        throw InternalError("make_feasible exceeded the pivot budget");
      }
      Eigen::Index r = -1;
      for (Eigen::Index i = 0; i < k_; ++i) {
        const W value = row_rhs_product(i);
        if (value < 0 && (r < 0 || basis_[static_cast<std::size_t>(i)] <
                                       basis_[static_cast<std::size_t>(r)])) {
          r = i;
        }
        if (checks_ && checks_->verify_invariants && value != 0 &&
            !is_active(basis_[static_cast<std::size_t>(i)])) {
          throw InternalError("eliminated basic variable acquired a non-zero value");
        }
      }
      if (r < 0) return Feasibility::kFeasible;
      if (checks_ && checks_->track_bases) {
        std::vector<Eigen::Index> key(basis_);
        std::sort(key.begin(), key.end());
        if (!seen.insert(std::move(key)).second) {
          throw InternalError("basis repeated within make_feasible");
        }
      }
      Eigen::Index q = -1;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (!is_active(j) || basis_pos_[static_cast<std::size_t>(j)] >= 0) continue;
        if (row_column_product(r, j) < 0) {
          q = j;
          break;
        }
      }
      if (q < 0) return Feasibility::kInfeasible;
      pivot(r, q);
    }
  }

  /// The current basic solution over all 3n columns.  Only meaningful after
  /// make_feasible reported kFeasible.
  BasicSolution basic_solution() const {
    BasicSolution out;
    out.numerators = BigVector::Zero(cols_);
    out.denominator = to_bigint(denom_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      out.numerators(basis_[static_cast<std::size_t>(i)]) =
          to_bigint(row_rhs_product(i));
    }
    return out;
  }

  /// Verifies the defining relation and the Hadamard bounds; throws on any
  /// violation.  O(k^3), intended for instrumented runs and tests.
  void verify_invariants() const {
    if (k_ == 0) return;
    if (denom_ <= 0) throw InternalError("tableau denominator must be positive");
    const BigInt& delta = sys_->delta;
    if (to_bigint(denom_) > delta) {
      throw InternalError("tableau denominator exceeds the determinant bound");
    }
    for (Eigen::Index i = 0; i < k_; ++i) {
      for (Eigen::Index l = 0; l < k_; ++l) {
        if (to_bigint(abs_value(inv_(i, l))) > delta) {
          throw InternalError("tableau entry exceeds the determinant bound");
        }
      }
      for (Eigen::Index s = 0; s < k_; ++s) {
        // During the basis crash an unassigned row s stands for the virtual
        // slack column e_s, which satisfies N * e_s = Delta * e_s throughout.
        const Eigen::Index col = basis_[static_cast<std::size_t>(s)];
        const W dot = col >= 0 ? row_column_product(i, col) : W(inv_(i, s));
        const W expected = i == s ? W(denom_) : W(0);
        if (dot != expected) {
          throw InternalError("tableau does not satisfy N * mat_beta = Delta * I");
        }
      }
    }
  }

  /// Root tableau: basis = the earliest k independent columns, b = 0.
  static Tableau make_initial(const ReducedSystem& sys, TableauChecks* checks) {
    Tableau t;
    t.sys_ = &sys;
    t.checks_ = checks;
    t.k_ = sys.rank;
    t.cols_ = sys.mat.cols();
    t.inv_ = Matrix::Identity(t.k_, t.k_);
    t.denom_ = 1;
    t.rhs_ = Vector::Zero(t.k_);
    t.basis_.assign(static_cast<std::size_t>(t.k_), -1);
    t.basis_pos_.assign(static_cast<std::size_t>(t.cols_), -1);
    t.active_.assign(static_cast<std::size_t>(t.cols_), 1);
    t.max_entry_ = 1;

    // Basis crash: walk the columns left to right and pivot each one that is
    // independent of the current partial basis into the first free row.  The
    // interim states satisfy the defining relation with identity "slack"
    // columns in the unassigned rows, so the usual pivot rule applies and the
    // Hadamard bound already holds (slack columns have unit norm).
    std::vector<char> assigned(static_cast<std::size_t>(t.k_), 0);
    Eigen::Index done = 0;
    for (Eigen::Index j = 0; j < t.cols_ && done < t.k_; ++j) {
      Eigen::Index r = -1;
      for (Eigen::Index i = 0; i < t.k_; ++i) {
        if (!assigned[static_cast<std::size_t>(i)] &&
            t.row_column_product(i, j) != 0) {
          r = i;
          break;
        }
      }
      if (r < 0) continue;
      t.pivot(r, j);
      assigned[static_cast<std::size_t>(r)] = 1;
      ++done;
    }
    if (done < t.k_) {
      throw InternalError("reduced matrix does not have the promised rank");
    }

    // Normalize the basis to ascending column order (deterministic layout).
    std::vector<Eigen::Index> order(static_cast<std::size_t>(t.k_));
    for (Eigen::Index i = 0; i < t.k_; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return t.basis_[static_cast<std::size_t>(a)] <
             t.basis_[static_cast<std::size_t>(b)];
    });
    Matrix inv(t.k_, t.k_);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(t.k_));
    for (Eigen::Index i = 0; i < t.k_; ++i) {
      const Eigen::Index src = order[static_cast<std::size_t>(i)];
      inv.row(i) = t.inv_.row(src);
      basis[static_cast<std::size_t>(i)] = t.basis_[static_cast<std::size_t>(src)];
      t.basis_pos_[static_cast<std::size_t>(
          basis[static_cast<std::size_t>(i)])] = i;
    }
    t.inv_.swap(inv);
    t.basis_.swap(basis);
    if (t.checks_ && t.checks_->verify_invariants) t.verify_invariants();
    return t;
  }

 private:
  Tableau() = default;

  static constexpr std::uint64_t kPivotLimit = 1u << 24;

  /// (N * mat[:, j])_r with double-wide accumulation.
  W row_column_product(Eigen::Index r, Eigen::Index j) const {
    W acc = 0;
    for (Eigen::Index l = 0; l < k_; ++l) {
      acc += W(inv_(r, l)) * W(Scalar(sys_->mat(l, j)));
    }
    return acc;
  }

  /// (N * b)_r with double-wide accumulation.
  W row_rhs_product(Eigen::Index r) const {
    W acc = 0;
    for (Eigen::Index l = 0; l < k_; ++l) {
      acc += W(inv_(r, l)) * W(rhs_(l));
    }
    return acc;
  }

  void note_entry(const Scalar& v) {
    const Scalar a = abs_value(v);
    if (a > max_entry_) max_entry_ = a;
  }

  /// Replaces basis position r by column q.  q must be active, non-basic and
  /// independent in row r (u_r != 0).
  void pivot(Eigen::Index r, Eigen::Index q) {
    Vector u(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      u(i) = narrow<Scalar>(row_column_product(i, q));
    }
    const Scalar alpha = u(r);
    if (alpha == 0) throw InternalError("pivot on a zero element");
    const bool verify = checks_ && checks_->verify_invariants;
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (i == r) continue;
      for (Eigen::Index c = 0; c < k_; ++c) {
        const W num = W(alpha) * W(inv_(i, c)) - W(u(i)) * W(inv_(r, c));
        const W quot = num / W(denom_);
        if (verify && quot * W(denom_) != num) {
          throw InternalError("fraction-free pivot division is not exact");
        }
        inv_(i, c) = narrow<Scalar>(quot);
        note_entry(inv_(i, c));
      }
    }
    const Eigen::Index leaving = basis_[static_cast<std::size_t>(r)];
    if (leaving >= 0) basis_pos_[static_cast<std::size_t>(leaving)] = -1;
    basis_[static_cast<std::size_t>(r)] = q;
    basis_pos_[static_cast<std::size_t>(q)] = r;
    if (alpha < 0) {
      inv_ = -inv_;
      denom_ = Scalar(-alpha);
    } else {
      denom_ = alpha;
    }
    note_entry(denom_);
    if (checks_) {
      checks_->pivots.fetch_add(1, std::memory_order_relaxed);
      if (verify) {
        verify_invariants();
        checks_->verified_pivots.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }

  const ReducedSystem* sys_ = nullptr;
  TableauChecks* checks_ = nullptr;
  Eigen::Index k_ = 0;
  Eigen::Index cols_ = 0;
  Matrix inv_;        // N
  Scalar denom_{1};   // Delta > 0
  Vector rhs_;        // b
  std::vector<Eigen::Index> basis_;      // position -> column
  std::vector<Eigen::Index> basis_pos_;  // column -> position, -1 if non-basic
  std::vector<char> active_;
  Scalar max_entry_{1};
};

/// Root tableau for a reduced system: basis = the earliest k independent
/// columns, b = 0 (feasible by construction).
template <typename Scalar>
Tableau<Scalar> initial_tableau(const ReducedSystem& sys,
                                TableauChecks* checks = nullptr) {
  return Tableau<Scalar>::make_initial(sys, checks);
}

/// Result of step_down: the child tableau and its feasibility verdict.  When
/// infeasible, the tableau state is only meaningful for max_entry_seen().
template <typename Scalar>
struct StepDownResult {
  Tableau<Scalar> tableau;
  Feasibility feasibility;
  bool feasible() const { return feasibility == Feasibility::kFeasible; }
};

/// Child tableau obtained by deciding triple `triple` with symbol `s`:
/// symbol 0 eliminates all three columns of the triple, symbols 1..3
/// eliminate the other two and lower-bound the chosen one.
template <typename Scalar>
StepDownResult<Scalar> step_down(const Tableau<Scalar>& parent,
                                 Eigen::Index triple, Symbol s) {
  StepDownResult<Scalar> out{parent, Feasibility::kFeasible};
  const Eigen::Index base = 3 * triple;
  for (Eigen::Index slot = 0; slot < 3; ++slot) {
    if (s != 0 && slot + 1 == static_cast<Eigen::Index>(s)) continue;
    if (out.tableau.enforce_zero(base + slot) == Feasibility::kInfeasible) {
      out.feasibility = Feasibility::kInfeasible;
      return out;
    }
  }
  if (s != 0) out.tableau.add_nonzero_constraint(base + s - 1);
  out.feasibility = out.tableau.make_feasible();
  return out;
}

}  // namespace qvert

#endif  // QVERT_TABLEAU_HPP
