#ifndef QVERT_TYPEVEC_HPP
#define QVERT_TYPEVEC_HPP

/*
 * Type vectors over the alphabet {0,1,2,3}.
 *
 * A solution vector x in R^{3n} is grouped into n coordinate triples.  The
 * quadrilateral constraints allow at most one non-zero coordinate per triple,
 * so the combinatorial shape of x is captured by one symbol per triple:
 * 0 when the whole triple vanishes, otherwise the 1-based slot of the
 * non-zero coordinate.  Partial type vectors additionally allow an
 * "undecided" symbol and model interior nodes of the enumeration tree.
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qvert {

using Symbol = std::uint8_t;

/// Placeholder symbol for undecided triples of a partial type vector.
inline constexpr Symbol kUndecided = 4;

/// Thrown when a vector violates the quadrilateral constraints (two non-zero
/// coordinates inside one triple), so no type vector exists for it.
class QuadrilateralViolation : public std::invalid_argument {
 public:
  explicit QuadrilateralViolation(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Complete type vector: one symbol from {0,1,2,3} per triple.
class TypeVector {
 public:
  TypeVector() = default;
  explicit TypeVector(std::vector<Symbol> symbols) : s_(std::move(symbols)) {
    for (Symbol s : s_) {
      if (s > 3) throw std::invalid_argument("type vector symbol out of range");
    }
  }

  std::size_t size() const { return s_.size(); }
  Symbol operator[](std::size_t i) const { return s_[i]; }
  const std::vector<Symbol>& symbols() const { return s_; }

  friend bool operator==(const TypeVector& a, const TypeVector& b) {
    return a.s_ == b.s_;
  }
  friend bool operator<(const TypeVector& a, const TypeVector& b) {
    return a.s_ < b.s_;
  }

 private:
  std::vector<Symbol> s_;
};

/// Partial type vector: symbols from {0,1,2,3} plus kUndecided.
class PartialTypeVector {
 public:
  PartialTypeVector() = default;
  explicit PartialTypeVector(std::vector<Symbol> symbols)
      : s_(std::move(symbols)) {
    for (Symbol s : s_) {
      if (s > kUndecided) {
        throw std::invalid_argument("partial type vector symbol out of range");
      }
    }
  }
  /// Fully undecided vector of the given length.
  static PartialTypeVector undecided(std::size_t n) {
    return PartialTypeVector(std::vector<Symbol>(n, kUndecided));
  }
  /// Embeds a complete type vector.
  explicit PartialTypeVector(const TypeVector& t) : s_(t.symbols()) {}

  std::size_t size() const { return s_.size(); }
  Symbol operator[](std::size_t i) const { return s_[i]; }
  void set(std::size_t i, Symbol s) {
    if (s > kUndecided) throw std::invalid_argument("symbol out of range");
    s_[i] = s;
  }
  const std::vector<Symbol>& symbols() const { return s_; }

  bool complete() const {
    for (Symbol s : s_)
      if (s == kUndecided) return false;
    return true;
  }

  /// Replaces every undecided symbol by 0.
  TypeVector zero_completion() const {
    std::vector<Symbol> out(s_);
    for (Symbol& s : out)
      if (s == kUndecided) s = 0;
    return TypeVector(std::move(out));
  }

  friend bool operator==(const PartialTypeVector& a,
                         const PartialTypeVector& b) {
    return a.s_ == b.s_;
  }

 private:
  std::vector<Symbol> s_;
};

/// Computes the type vector of x.  The length of x must be a positive
/// multiple of 3; a triple with two or more non-zero coordinates raises
/// QuadrilateralViolation.
template <typename Derived>
TypeVector type_vector_of(const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index len = x.size();
  if (len % 3 != 0) {
    throw std::invalid_argument("coordinate vector length is not a multiple of 3");
  }
  std::vector<Symbol> out(static_cast<std::size_t>(len / 3), 0);
  for (Eigen::Index t = 0; t < len / 3; ++t) {
    for (Eigen::Index slot = 0; slot < 3; ++slot) {
      if (x(3 * t + slot) != 0) {
        if (out[static_cast<std::size_t>(t)] != 0) {
          throw QuadrilateralViolation(
              "triple " + std::to_string(t) + " has two non-zero coordinates");
        }
        out[static_cast<std::size_t>(t)] = static_cast<Symbol>(slot + 1);
      }
    }
  }
  return TypeVector(std::move(out));
}

/// Domination partial order: a >= b iff at every position b agrees with a or
/// is 0.  Equivalently, the zero set of any x typed a is contained in the
/// zero set of any x typed b.
inline bool dominates(const TypeVector& a, const TypeVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("type vector length mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] != a[i] && b[i] != 0) return false;
  }
  return true;
}

/// Two partial vectors match when every position is equal or undecided on at
/// least one side.
inline bool matches(const PartialTypeVector& a, const PartialTypeVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("type vector length mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i] && a[i] != kUndecided && b[i] != kUndecided) return false;
  }
  return true;
}

/// True iff every decided symbol is 0 (undecided symbols count as 0).
inline bool is_zero(const PartialTypeVector& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0 && t[i] != kUndecided) return false;
  }
  return true;
}

/// Linear-programming constraints induced by a partial type vector:
/// coordinates in `zero` are fixed to 0, coordinates in `lower_bounded` are
/// required to be >= 1.  Indices are 0-based columns; undecided triples
/// contribute nothing.
struct ConstraintSet {
  std::vector<Eigen::Index> zero;           ///< the index set I
  std::vector<Eigen::Index> lower_bounded;  ///< the index set J
};

inline ConstraintSet type_constraints(const PartialTypeVector& t) {
  ConstraintSet cs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Eigen::Index base = 3 * static_cast<Eigen::Index>(i);
    const Symbol s = t[i];
    if (s == kUndecided) continue;
    if (s == 0) {
      cs.zero.push_back(base);
      cs.zero.push_back(base + 1);
      cs.zero.push_back(base + 2);
    } else {
      for (Eigen::Index slot = 0; slot < 3; ++slot) {
        if (slot + 1 == s) {
          cs.lower_bounded.push_back(base + slot);
        } else {
          cs.zero.push_back(base + slot);
        }
      }
    }
  }
  return cs;
}

inline std::string to_string(const TypeVector& t) {
  std::string out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.push_back(static_cast<char>('0' + t[i]));
  }
  return out;
}

inline std::string to_string(const PartialTypeVector& t) {
  std::string out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.push_back(t[i] == kUndecided ? '-' : static_cast<char>('0' + t[i]));
  }
  return out;
}

inline TypeVector parse_type_vector(const std::string& text) {
  std::vector<Symbol> s;
  s.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '3') {
      throw std::invalid_argument("invalid type vector character");
    }
    s.push_back(static_cast<Symbol>(c - '0'));
  }
  return TypeVector(std::move(s));
}

inline PartialTypeVector parse_partial_type_vector(const std::string& text) {
  std::vector<Symbol> s;
  s.reserve(text.size());
  for (char c : text) {
    if (c == '-') {
      s.push_back(kUndecided);
    } else if (c >= '0' && c <= '3') {
      s.push_back(static_cast<Symbol>(c - '0'));
    } else {
      throw std::invalid_argument("invalid partial type vector character");
    }
  }
  return PartialTypeVector(std::move(s));
}

}  // namespace qvert

#endif  // QVERT_TYPEVEC_HPP
