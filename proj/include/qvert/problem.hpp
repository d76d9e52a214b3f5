#ifndef QVERT_PROBLEM_HPP
#define QVERT_PROBLEM_HPP

/*
 * Problem model: a system of matching equations over quadrilateral
 * coordinates, together with the preprocessing that the enumeration core
 * relies on:
 *
 *   - redundant-row removal (exact rank, earliest rows win),
 *   - column reduction (divide every non-zero column by its gcd),
 *   - the determinant bound delta = product of the k largest column norms,
 *   - a-priori bounds on solution coordinates and on tableau entries.
 */

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qvert/arith.hpp"
#include "qvert/bareiss.hpp"

namespace qvert {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

enum class Orientability { kYes, kNo, kUnknown };

/// A matching-equation system: `mat` has one row per equation and 3n columns,
/// three consecutive columns per tetrahedron.
struct ProblemInstance {
  Eigen::Index tets = 0;  ///< n, the number of coordinate triples
  IntMatrix mat;          ///< e x 3n integer matrix
  Orientability orientable = Orientability::kUnknown;

  Eigen::Index rows() const { return mat.rows(); }
  Eigen::Index cols() const { return mat.cols(); }
};

/// Error in the textual instance format.  `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::int64_t parse_int64(std::string_view tok, int line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(line, "entry '" + std::string(tok) + "' is out of range");
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses the textual instance format:
///
///     # comment
///     tets <n>
///     rows <e>
///     orientable <0|1>      (optional)
///     matrix
///     <e lines of 3n space-separated integers>
///
/// '#' starts a comment anywhere on a line; blank lines are ignored.
inline ProblemInstance parse_problem(std::string_view text) {
  struct Line {
    int number;
    std::vector<std::string_view> tokens;
  };
  std::vector<Line> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                       : eol - pos);
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto tokens = detail::tokenize(raw);
    if (!tokens.empty()) lines.push_back({line_no, std::move(tokens)});
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }

  std::size_t cursor = 0;
  const int eof_line = line_no;
  auto next = [&]() -> const Line& {
    if (cursor >= lines.size()) {
      throw ParseError(eof_line, "unexpected end of input");
    }
    return lines[cursor++];
  };

  ProblemInstance inst;

  {
    const Line& l = next();
    if (l.tokens.size() != 2 || l.tokens[0] != "tets") {
      throw ParseError(l.number, "expected 'tets <n>'");
    }
    const std::int64_t n = detail::parse_int64(l.tokens[1], l.number);
    if (n < 1) throw ParseError(l.number, "tets must be positive");
    inst.tets = static_cast<Eigen::Index>(n);
  }

  Eigen::Index rows = 0;
  {
    const Line& l = next();
    if (l.tokens.size() != 2 || l.tokens[0] != "rows") {
      throw ParseError(l.number, "expected 'rows <e>'");
    }
    const std::int64_t e = detail::parse_int64(l.tokens[1], l.number);
    if (e < 0) throw ParseError(l.number, "rows must be non-negative");
    rows = static_cast<Eigen::Index>(e);
  }

  {
    const Line& l = next();
    if (l.tokens[0] == "orientable") {
      if (l.tokens.size() != 2 || (l.tokens[1] != "0" && l.tokens[1] != "1")) {
        throw ParseError(l.number, "expected 'orientable <0|1>'");
      }
      inst.orientable =
          l.tokens[1] == "1" ? Orientability::kYes : Orientability::kNo;
      const Line& m = next();
      if (m.tokens.size() != 1 || m.tokens[0] != "matrix") {
        throw ParseError(m.number, "expected 'matrix'");
      }
    } else if (l.tokens.size() == 1 && l.tokens[0] == "matrix") {
      // fall through
    } else {
      throw ParseError(l.number, "expected 'matrix' or 'orientable <0|1>'");
    }
  }

  const Eigen::Index cols = 3 * inst.tets;
  inst.mat.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Line& l = next();
    if (static_cast<Eigen::Index>(l.tokens.size()) != cols) {
      throw ParseError(l.number, "row " + std::to_string(r + 1) + " has " +
                                     std::to_string(l.tokens.size()) +
                                     " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      inst.mat(r, c) =
          detail::parse_int64(l.tokens[static_cast<std::size_t>(c)], l.number);
    }
  }
  if (cursor < lines.size()) {
    throw ParseError(lines[cursor].number, "unexpected content after matrix rows");
  }
  return inst;
}

/// Serializes an instance in the exact textual format accepted by
/// parse_problem.
inline std::string to_text(const ProblemInstance& inst) {
  std::string out = "tets " + std::to_string(inst.tets) + "\n" +
                    "rows " + std::to_string(inst.rows()) + "\n";
  if (inst.orientable != Orientability::kUnknown) {
    out += "orientable ";
    out += inst.orientable == Orientability::kYes ? '1' : '0';
    out += '\n';
  }
  out += "matrix\n";
  for (Eigen::Index r = 0; r < inst.rows(); ++r) {
    for (Eigen::Index c = 0; c < inst.cols(); ++c) {
      if (c > 0) out += ' ';
      out += std::to_string(inst.mat(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Structural warnings: matching matrices arising from triangulations have at
/// most four non-zero entries per column with absolute values summing to at
/// most 4 (and only +-1, +-2 in the orientable case).  Violations do not stop
/// the solver, but the a-priori delta caps no longer apply.
inline std::vector<std::string> sparsity_warnings(const ProblemInstance& inst) {
  std::vector<std::string> out;
  for (Eigen::Index c = 0; c < inst.cols(); ++c) {
    int nonzeros = 0;
    BigInt abs_sum = 0;
    bool bad_entry = false;
    for (Eigen::Index r = 0; r < inst.rows(); ++r) {
      const std::int64_t v = inst.mat(r, c);
      if (v == 0) continue;
      ++nonzeros;
      abs_sum += v < 0 ? BigInt(-BigInt(v)) : BigInt(v);
      if (inst.orientable == Orientability::kYes && v != 1 && v != -1 &&
          v != 2 && v != -2) {
        bad_entry = true;
      }
    }
    const std::string col = "column " + std::to_string(c);
    if (nonzeros > 4) {
      out.push_back(col + " has " + std::to_string(nonzeros) +
                    " non-zero entries (expected at most 4)");
    }
    if (abs_sum > 4) {
      out.push_back(col + " has absolute entry sum " + abs_sum.str() +
                    " (expected at most 4)");
    }
    if (bad_entry) {
      out.push_back(col + " has entries outside {+-1,+-2} on an orientable instance");
    }
  }
  return out;
}

/// Result of dividing every non-zero column by its (positive) gcd.
struct ColumnReduction {
  IntMatrix reduced;                   ///< same shape as the input
  std::vector<std::int64_t> divisors;  ///< per-column gcd, 1 for zero columns
  BigInt divisor_lcm;                  ///< lcm of all divisors
};

inline ColumnReduction reduce_columns(const IntMatrix& m) {
  ColumnReduction out;
  out.reduced = m;
  out.divisors.assign(static_cast<std::size_t>(m.cols()), 1);
  out.divisor_lcm = 1;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::int64_t g = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      g = std::gcd(g, m(r, c));
    }
    if (g == 0) g = 1;
    out.divisors[static_cast<std::size_t>(c)] = g;
    if (g != 1) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) out.reduced(r, c) /= g;
    }
    out.divisor_lcm = boost::multiprecision::lcm(out.divisor_lcm, BigInt(g));
  }
  return out;
}

/// Keeps the earliest maximal set of linearly independent rows.
struct RowSelection {
  IntMatrix selected;                   ///< rank x cols
  std::vector<Eigen::Index> kept_rows;  ///< indices into the input, ascending
  Eigen::Index rank = 0;
};

inline RowSelection drop_redundant_rows(const IntMatrix& m) {
  RowSelection out;
  BigMatrix kept(0, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    BigMatrix candidate(kept.rows() + 1, m.cols());
    candidate.topRows(kept.rows()) = kept;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      candidate(kept.rows(), c) = BigInt(m(r, c));
    }
    if (bareiss_rank(candidate) == candidate.rows()) {
      kept.swap(candidate);
      out.kept_rows.push_back(r);
    }
  }
  out.rank = static_cast<Eigen::Index>(out.kept_rows.size());
  out.selected.resize(out.rank, m.cols());
  for (Eigen::Index i = 0; i < out.rank; ++i) {
    out.selected.row(i) = m.row(out.kept_rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Square of the determinant bound: the product of the `rank` largest squared
/// column Euclidean norms.  Exact (integer).
inline BigInt bounding_constant_squared(const IntMatrix& m, Eigen::Index rank) {
  if (rank < 0 || rank > m.cols()) {
    throw std::invalid_argument("rank out of range");
  }
  std::vector<BigInt> sq(static_cast<std::size_t>(m.cols()), BigInt(0));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      sq[static_cast<std::size_t>(c)] += BigInt(m(r, c)) * BigInt(m(r, c));
    }
  }
  std::sort(sq.begin(), sq.end(), std::greater<BigInt>());
  BigInt prod = 1;
  for (Eigen::Index i = 0; i < rank; ++i) prod *= sq[static_cast<std::size_t>(i)];
  return prod;
}

/// Hadamard-style bound: with B any basis of `rank` columns of m, both
/// |det B| and every entry of det(B) * B^{-1} are bounded by the product of
/// the `rank` largest column norms.  Returned as the integer ceiling of that
/// product, computed exactly from the squared norms.
inline BigInt bounding_constant(const IntMatrix& m, Eigen::Index rank) {
  return isqrt_ceil(bounding_constant_squared(m, rank));
}

/// A-priori bounds for an instance with n triples, reduced rank k and
/// determinant bound delta.
struct CoordinateBound {
  BigInt per_coordinate;  ///< bound on |u_i| over all emitted solutions
  BigInt tableau_entry;   ///< bound on |Delta| and |N_ij| (equals delta)
  BigInt delta_cap;       ///< n-independent cap on delta under the sparsity rules
  int recommended_bits = 0;  ///< width needed for double-width intermediates
};

inline CoordinateBound coordinate_bound(Eigen::Index n, Eigen::Index k,
                                        const BigInt& delta,
                                        Orientability orientable) {
  if (n < 1 || k < 0) throw std::invalid_argument("invalid dimensions");
  CoordinateBound out;
  const bool tight = orientable == Orientability::kYes;
  const BigInt factor =
      tight ? BigInt(4 * n * k + 2) : BigInt(36 * n * k + 12);
  out.per_coordinate = factor * delta;
  out.tableau_entry = delta;
  BigInt cap_sq = 1;
  for (Eigen::Index i = 0; i < k; ++i) cap_sq *= tight ? 6 : 10;
  out.delta_cap = isqrt_ceil(cap_sq);
  out.recommended_bits = 2 * bit_length(delta) + 2;
  return out;
}

/// Immutable preprocessed system shared by every tableau of a traversal.
struct ReducedSystem {
  IntMatrix mat;                       ///< full-rank, column-reduced, k x 3n
  std::vector<std::int64_t> divisors;  ///< column gcds of the full-rank matrix
  BigInt divisor_lcm;
  std::vector<Eigen::Index> kept_rows;
  Eigen::Index tets = 0;
  Eigen::Index rank = 0;
  BigInt delta;
  BigInt delta_squared;
  CoordinateBound bound;
  BigInt row_abs_max;  ///< max over rows of sum_j |mat(i,j)|; bounds |b_i|
  BigInt col_abs_max;  ///< max over columns of sum_i |mat(i,j)|

  static ReducedSystem build(const ProblemInstance& inst) {
    ReducedSystem rs;
    rs.tets = inst.tets;
    RowSelection rows = drop_redundant_rows(inst.mat);
    ColumnReduction cols = reduce_columns(rows.selected);
    rs.mat = std::move(cols.reduced);
    rs.divisors = std::move(cols.divisors);
    rs.divisor_lcm = std::move(cols.divisor_lcm);
    rs.kept_rows = std::move(rows.kept_rows);
    rs.rank = rows.rank;
    rs.delta_squared = bounding_constant_squared(rs.mat, rs.rank);
    rs.delta = isqrt_ceil(rs.delta_squared);
    rs.bound = coordinate_bound(inst.tets, rs.rank, rs.delta, inst.orientable);
    rs.row_abs_max = 0;
    rs.col_abs_max = 0;
    std::vector<BigInt> col_sum(static_cast<std::size_t>(rs.mat.cols()), BigInt(0));
    for (Eigen::Index r = 0; r < rs.mat.rows(); ++r) {
      BigInt row_sum = 0;
      for (Eigen::Index c = 0; c < rs.mat.cols(); ++c) {
        const BigInt a = rs.mat(r, c) < 0 ? BigInt(-BigInt(rs.mat(r, c)))
                                          : BigInt(rs.mat(r, c));
        row_sum += a;
        col_sum[static_cast<std::size_t>(c)] += a;
      }
      rs.row_abs_max = std::max(rs.row_abs_max, row_sum);
    }
    for (const BigInt& s : col_sum) rs.col_abs_max = std::max(rs.col_abs_max, s);
    return rs;
  }

  /// True when the whole traversal can run in 64-bit storage with __int128
  /// intermediates: tableau entries stay below delta (Hadamard) and every
  /// accumulated inner product fits the double-wide type.
  bool wide_mode_safe() const {
    if (bit_length(delta) > 62) return false;
    if (bit_length(row_abs_max) > 62) return false;
    const BigInt inner = std::max(col_abs_max, BigInt(rank) * row_abs_max);
    if (bit_length(delta) + bit_length(inner) + 1 > 126) return false;
    return true;
  }
};

}  // namespace qvert

#endif  // QVERT_PROBLEM_HPP
