#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace strata {

// Coefficient rings. Everything in the library is exact: no floating point.
// A ring policy provides the scalar type and the two facts the elimination
// code needs (is every nonzero element a unit, and how to print).

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct ZRing {
  using Scalar = Int;
  static constexpr bool is_field = false;
  static std::string name() { return "Z"; }
};

struct QRing {
  using Scalar = Rat;
  static constexpr bool is_field = true;
  static std::string name() { return "Q"; }
};

inline Int ring_abs(const Int& a) { return a < 0 ? Int(-a) : a; }
inline Rat ring_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

// Quotient used by the elimination loop: exact over a field, truncated
// toward zero over Z (so |b - q*a| < |a|).
inline Int reduction_quotient(const Int& b, const Int& a) { return b / a; }
inline Rat reduction_quotient(const Rat& b, const Rat& a) { return b / a; }

// a | b in the ring sense (a nonzero).
inline bool ring_divides(const Int& a, const Int& b) { return a != 0 && b % a == 0; }
inline bool ring_divides(const Rat& a, const Rat& b) {
  (void)b;
  return a != 0;
}

inline std::string scalar_to_string(const Int& a) { return a.str(); }
inline std::string scalar_to_string(const Rat& a) {
  if (denominator(a) == 1) return numerator(a).str();
  return numerator(a).str() + "/" + denominator(a).str();
}

}  // namespace strata
