#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "qvert/generator.hpp"
#include "qvert/oracle.hpp"
#include "qvert/problem.hpp"
#include "qvert/tableau.hpp"

using qvert::BigInt;
using qvert::BigRational;
using qvert::Feasibility;
using qvert::IntMatrix;
using qvert::ProblemInstance;
using qvert::RationalVector;
using qvert::ReducedSystem;
using qvert::Tableau;
using qvert::TableauChecks;

namespace {

ProblemInstance example_instance() {
  ProblemInstance inst;
  inst.tets = 2;
  inst.mat = IntMatrix(2, 6);
  inst.mat << 0, 1, -1, 2, -1, -1, -2, 0, 2, -2, 0, 2;
  return inst;
}

ProblemInstance single_row(std::vector<std::int64_t> row) {
  ProblemInstance inst;
  inst.tets = static_cast<Eigen::Index>(row.size()) / 3;
  inst.mat = IntMatrix(1, static_cast<Eigen::Index>(row.size()));
  for (std::size_t c = 0; c < row.size(); ++c) {
    inst.mat(0, static_cast<Eigen::Index>(c)) = row[c];
  }
  return inst;
}

/// Recomputes N * mat_beta and compares against Delta * I with plain
/// big-integer arithmetic (independent of the class's own checker).
template <typename Scalar>
void check_defining_relation(const Tableau<Scalar>& t) {
  const ReducedSystem& sys = t.system();
  const Eigen::Index k = sys.rank;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      BigInt sum = 0;
      for (Eigen::Index l = 0; l < k; ++l) {
        sum += qvert::to_bigint(t.inverse_numerator()(i, l)) *
               BigInt(sys.mat(l, t.basis()[static_cast<std::size_t>(c)]));
      }
      CHECK(sum == (i == c ? qvert::to_bigint(t.denominator()) : BigInt(0)));
    }
  }
  CHECK(qvert::to_bigint(t.denominator()) > 0);
  CHECK(qvert::to_bigint(t.denominator()) <= sys.delta);
  CHECK(qvert::to_bigint(t.max_entry_seen()) <= sys.delta);
}

bool all_zero(const qvert::BigVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0) return false;
  }
  return true;
}

/// The reference LP for the tableau's current constraint state.
RationalVector rational_rhs(const ReducedSystem& sys,
                            const std::vector<Eigen::Index>& lower_bounded) {
  RationalVector b = RationalVector::Zero(sys.mat.rows());
  for (Eigen::Index j : lower_bounded) {
    for (Eigen::Index r = 0; r < sys.mat.rows(); ++r) {
      b(r) -= BigRational(sys.mat(r, j));
    }
  }
  return b;
}

/// Checks an (allegedly feasible) tableau's basic solution exactly:
/// mat * x' = b componentwise and x' >= 0.
template <typename Scalar>
void check_basic_solution(const Tableau<Scalar>& t) {
  const ReducedSystem& sys = t.system();
  const qvert::BasicSolution bs = t.basic_solution();
  CHECK(bs.denominator > 0);
  for (Eigen::Index j = 0; j < sys.mat.cols(); ++j) {
    CHECK(bs.numerators(j) >= 0);
    if (!t.is_active(j)) CHECK(bs.numerators(j) == 0);
  }
  qvert::BigVector lhs = qvert::BigVector::Zero(sys.mat.rows());
  for (Eigen::Index r = 0; r < sys.mat.rows(); ++r) {
    for (Eigen::Index j = 0; j < sys.mat.cols(); ++j) {
      lhs(r) += BigInt(sys.mat(r, j)) * bs.numerators(j);
    }
  }
  for (Eigen::Index r = 0; r < sys.mat.rows(); ++r) {
    CHECK(lhs(r) == bs.denominator * qvert::to_bigint(t.rhs()(r)));
  }
}

}  // namespace

TEST_CASE("initial tableau inverts the earliest independent columns") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  TableauChecks checks;
  checks.verify_invariants = true;
  const auto t = qvert::initial_tableau<std::int64_t>(sys, &checks);

  CHECK(t.basis() == std::vector<Eigen::Index>{0, 1});
  CHECK(t.denominator() == 1);
  Tableau<std::int64_t>::Matrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(t.inverse_numerator() == expected);
  CHECK(t.rhs().isZero());
  check_defining_relation(t);
  CHECK(checks.verified_pivots.load() > 0);

  // With b = 0 the initial basis is immediately feasible.
  auto copy = t;
  CHECK(copy.make_feasible() == Feasibility::kFeasible);
  CHECK(all_zero(copy.basic_solution().numerators));
}

TEST_CASE("rank-0 systems give an empty, trivially feasible tableau") {
  ProblemInstance inst;
  inst.tets = 1;
  inst.mat = IntMatrix(0, 3);
  const ReducedSystem sys = ReducedSystem::build(inst);
  CHECK(sys.rank == 0);
  auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);
  CHECK(t.make_feasible() == Feasibility::kFeasible);
  CHECK(all_zero(t.basic_solution().numerators));
  CHECK(t.basic_solution().denominator == 1);
}

TEST_CASE("identity submatrix yields the identity tableau") {
  ProblemInstance inst;
  inst.tets = 1;
  inst.mat = IntMatrix::Identity(3, 3);
  const ReducedSystem sys = ReducedSystem::build(inst);
  CHECK(sys.rank == 3);
  const auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);
  CHECK(t.denominator() == 1);
  CHECK(t.inverse_numerator().isIdentity());
  CHECK(t.basis() == std::vector<Eigen::Index>{0, 1, 2});
}

TEST_CASE("add_nonzero_constraint subtracts the column from the rhs") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);

  t.add_nonzero_constraint(0);  // reduced column 0 is (0, -1)
  CHECK(t.rhs()(0) == 0);
  CHECK(t.rhs()(1) == 1);

  t.add_nonzero_constraint(3);  // reduced column 3 is (1, -1)
  CHECK(t.rhs()(0) == -1);
  CHECK(t.rhs()(1) == 2);
}

TEST_CASE("adding a zero column leaves the rhs unchanged") {
  ProblemInstance inst;
  inst.tets = 2;
  inst.mat = IntMatrix(1, 6);
  inst.mat << 1, -1, 0, 0, 0, 0;
  const ReducedSystem sys = ReducedSystem::build(inst);
  auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);
  t.add_nonzero_constraint(3);
  CHECK(t.rhs().isZero());
  CHECK_THROWS_AS(
      [&] {
        t.enforce_zero(4);
        t.add_nonzero_constraint(4);
      }(),
      qvert::InternalError);
}

TEST_CASE("enforce_zero on a non-basic column only deactivates it") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  TableauChecks checks;
  checks.verify_invariants = true;
  auto t = qvert::initial_tableau<std::int64_t>(sys, &checks);
  const auto n_before = t.inverse_numerator();
  const auto basis_before = t.basis();

  CHECK(t.enforce_zero(4) == Feasibility::kFeasible);
  CHECK_FALSE(t.is_active(4));
  CHECK(t.inverse_numerator() == n_before);
  CHECK(t.basis() == basis_before);
  CHECK(t.denominator() == 1);
}

TEST_CASE("enforce_zero pivots a basic column out when possible") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  TableauChecks checks;
  checks.verify_invariants = true;
  auto t = qvert::initial_tableau<std::int64_t>(sys, &checks);

  CHECK(t.enforce_zero(0) == Feasibility::kFeasible);
  CHECK_FALSE(t.is_active(0));
  for (Eigen::Index pos : t.basis()) CHECK(pos != 0);
  check_defining_relation(t);
}

TEST_CASE("enforce_zero proves infeasibility when the row pins a non-zero value") {
  const ProblemInstance inst = single_row({1, 0, 0});
  const ReducedSystem sys = ReducedSystem::build(inst);
  auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);
  t.add_nonzero_constraint(0);  // forces x_0 >= 1, i.e. basic value -1 below
  CHECK(t.enforce_zero(0) == Feasibility::kInfeasible);
}

TEST_CASE("enforce_zero silently retires a dead row pinned to zero") {
  const ProblemInstance inst = single_row({1, 0, 0});
  const ReducedSystem sys = ReducedSystem::build(inst);
  TableauChecks checks;
  checks.verify_invariants = true;
  auto t = qvert::initial_tableau<std::int64_t>(sys, &checks);
  CHECK(t.enforce_zero(0) == Feasibility::kFeasible);
  CHECK_FALSE(t.is_active(0));
  CHECK(t.make_feasible() == Feasibility::kFeasible);
  CHECK(all_zero(t.basic_solution().numerators));
}

TEST_CASE("make_feasible solves the worked example with x_0 required") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  TableauChecks checks;
  checks.verify_invariants = true;
  checks.track_bases = true;
  auto t = qvert::initial_tableau<std::int64_t>(sys, &checks);
  t.add_nonzero_constraint(0);
  CHECK(t.make_feasible() == Feasibility::kFeasible);
  check_defining_relation(t);
  check_basic_solution(t);

  const std::vector<Eigen::Index> lb{0};
  CHECK(qvert::feasible_by_enumeration(
      sys.mat, rational_rhs(sys, lb),
      std::vector<char>(static_cast<std::size_t>(sys.mat.cols()), 1)));
}

TEST_CASE("make_feasible certifies infeasibility of x_0 + x_1 = 0, x_0 >= 1") {
  const ProblemInstance inst = single_row({1, 1, 0});
  const ReducedSystem sys = ReducedSystem::build(inst);
  auto t = qvert::initial_tableau<std::int64_t>(sys, nullptr);
  t.add_nonzero_constraint(0);
  CHECK(t.make_feasible() == Feasibility::kInfeasible);

  const std::vector<Eigen::Index> lb{0};
  CHECK_FALSE(qvert::feasible_by_enumeration(
      sys.mat, rational_rhs(sys, lb),
      std::vector<char>(static_cast<std::size_t>(sys.mat.cols()), 1)));
}

TEST_CASE("step_down applies a symbol's constraints without mutating the parent") {
  const ReducedSystem sys = ReducedSystem::build(example_instance());
  TableauChecks checks;
  checks.verify_invariants = true;
  const auto root = qvert::initial_tableau<std::int64_t>(sys, &checks);

  const auto zero_child = qvert::step_down(root, 0, qvert::Symbol{0});
  CHECK(zero_child.feasible());
  CHECK_FALSE(zero_child.tableau.is_active(0));
  CHECK_FALSE(zero_child.tableau.is_active(1));
  CHECK_FALSE(zero_child.tableau.is_active(2));
  CHECK(zero_child.tableau.rhs().isZero());

  const auto one_child = qvert::step_down(root, 0, qvert::Symbol{1});
  CHECK(one_child.feasible());
  CHECK(one_child.tableau.is_active(0));
  CHECK_FALSE(one_child.tableau.is_active(1));
  CHECK_FALSE(one_child.tableau.is_active(2));
  check_defining_relation(one_child.tableau);
  check_basic_solution(one_child.tableau);

  // The parent keeps its full active set and zero rhs.
  for (Eigen::Index j = 0; j < 6; ++j) CHECK(root.is_active(j));
  CHECK(root.rhs().isZero());
}

namespace {

/// Walks the whole type tree (pruning only infeasible branches, as the
/// traversal does) and cross-checks every verdict against the enumeration
/// oracle.  Returns the number of nodes whose LP was decided.
template <typename Scalar>
int walk_and_check(const ReducedSystem& sys, const Tableau<Scalar>& parent,
                   qvert::PartialTypeVector& path, Eigen::Index depth) {
  int decided = 0;
  if (depth == static_cast<Eigen::Index>(path.size())) return decided;
  for (qvert::Symbol s = 0; s < 4; ++s) {
    path.set(static_cast<std::size_t>(depth), s);
    const auto child = qvert::step_down(parent, depth, s);

    const qvert::ConstraintSet cs = qvert::type_constraints(path);
    std::vector<char> active(static_cast<std::size_t>(sys.mat.cols()), 1);
    for (Eigen::Index j : cs.zero) active[static_cast<std::size_t>(j)] = 0;
    const bool reference = qvert::feasible_by_enumeration(
        sys.mat, rational_rhs(sys, cs.lower_bounded), active);

    CHECK(child.feasible() == reference);
    ++decided;
    if (child.feasible()) {
      check_defining_relation(child.tableau);
      check_basic_solution(child.tableau);
      decided += walk_and_check(sys, child.tableau, path, depth + 1);
    }
  }
  path.set(static_cast<std::size_t>(depth), qvert::kUndecided);
  return decided;
}

}  // namespace

TEST_CASE("tableau feasibility agrees with the enumeration oracle on full trees") {
  qvert::DeterministicRng rng(37);
  int total_nodes = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.bounded(3));
    const ProblemInstance inst = qvert::random_sparse_instance(n, 500 + trial);
    const ReducedSystem sys = ReducedSystem::build(inst);
    TableauChecks checks;
    checks.verify_invariants = true;
    checks.track_bases = true;
    const auto root = qvert::initial_tableau<qvert::BigInt>(sys, &checks);
    qvert::PartialTypeVector path =
        qvert::PartialTypeVector::undecided(static_cast<std::size_t>(n));
    total_nodes += walk_and_check(sys, root, path, 0);
  }
  CHECK(total_nodes >= 40);
}

TEST_CASE("wide and big tableaux take identical states along identical paths") {
  qvert::DeterministicRng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.bounded(3));
    const ProblemInstance inst = qvert::random_sparse_instance(n, 600 + trial);
    const ReducedSystem sys = ReducedSystem::build(inst);
    REQUIRE(sys.wide_mode_safe());

    auto wide = qvert::initial_tableau<std::int64_t>(sys, nullptr);
    auto big = qvert::initial_tableau<qvert::BigInt>(sys, nullptr);
    for (Eigen::Index depth = 0; depth < n; ++depth) {
      const auto s = static_cast<qvert::Symbol>(rng.bounded(4));
      auto wide_child = qvert::step_down(wide, depth, s);
      auto big_child = qvert::step_down(big, depth, s);
      REQUIRE(wide_child.feasible() == big_child.feasible());
      if (!wide_child.feasible()) break;
      CHECK(qvert::to_bigint(wide_child.tableau.denominator()) ==
            big_child.tableau.denominator());
      CHECK(wide_child.tableau.basis() == big_child.tableau.basis());
      for (Eigen::Index i = 0; i < sys.rank; ++i) {
        for (Eigen::Index c = 0; c < sys.rank; ++c) {
          CHECK(qvert::to_bigint(wide_child.tableau.inverse_numerator()(i, c)) ==
                big_child.tableau.inverse_numerator()(i, c));
        }
      }
      wide = std::move(wide_child.tableau);
      big = std::move(big_child.tableau);
    }
  }
}
