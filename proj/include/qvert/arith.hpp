#ifndef QVERT_ARITH_HPP
#define QVERT_ARITH_HPP

/*
 * Exact-arithmetic scalar support for the enumeration core.
 *
 * The pivoting engine is templated on an integer scalar type.  Two
 * instantiations are supported:
 *
 *   - std::int64_t  ("wide" mode): entries are machine words and every
 *     intermediate product is carried in __int128.  Callers must check
 *     wide_mode_safe() on the reduced system before selecting this mode.
 *   - boost::multiprecision::cpp_int ("big" mode): arbitrary precision,
 *     always safe.
 */

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace qvert {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Thrown when an internal invariant of the solver is violated.  Seeing this
/// exception always indicates a bug, never bad user input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// Double-width accumulator type for products of `Scalar` values.
template <typename Scalar>
struct WideOf;

template <>
struct WideOf<std::int64_t> {
  using type = __int128;
};

template <>
struct WideOf<BigInt> {
  using type = BigInt;
};

template <typename Scalar>
using Wide = typename WideOf<Scalar>::type;

inline BigInt to_bigint(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
  BigInt out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return neg ? BigInt(-out) : out;
}

inline BigInt to_bigint(std::int64_t v) { return BigInt(v); }
inline const BigInt& to_bigint(const BigInt& v) { return v; }

/// Narrowing conversion from the wide accumulator back to storage width.
/// Out-of-range values indicate a violated arithmetic bound, i.e. a bug.
template <typename Scalar>
Scalar narrow(const Wide<Scalar>& v);

template <>
inline std::int64_t narrow<std::int64_t>(const __int128& v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw InternalError("tableau entry exceeds the machine-word bound");
  }
  return static_cast<std::int64_t>(v);
}

template <>
inline BigInt narrow<BigInt>(const BigInt& v) {
  return v;
}

template <typename Scalar>
Scalar abs_value(const Scalar& v) {
  return v < 0 ? Scalar(-v) : v;
}

/// Number of bits in the binary representation of |v| (0 for v == 0).
inline int bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return static_cast<int>(boost::multiprecision::msb(boost::multiprecision::abs(v))) + 1;
}

/// Floor of the integer square root.
inline BigInt isqrt_floor(const BigInt& v) {
  if (v < 0) throw std::invalid_argument("isqrt of a negative value");
  return boost::multiprecision::sqrt(v);
}

/// Ceiling of the integer square root.
inline BigInt isqrt_ceil(const BigInt& v) {
  BigInt s = isqrt_floor(v);
  if (s * s != v) ++s;
  return s;
}

}  // namespace qvert

#endif  // QVERT_ARITH_HPP
