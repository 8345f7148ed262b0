#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "framemul/rat.hpp"

namespace framemul {

// Value = sign * coeff * prod_p p^radical[p].
// Canonical: coeff positive in lowest terms, radical exponents non-integer with
// |exponent| < 1 and the same sign as the full prime valuation (integer part of
// the valuation lives in coeff). Zero is (0, 1, {}). Canonical form is unique.
struct ExactScalar {
  int sign = 0;
  Rat coeff = 1;
  std::map<i64, Rat> radical;

  static ExactScalar zero() { return ExactScalar{}; }
  static ExactScalar one() { return from_int(1); }
  static ExactScalar from_int(i64 v);
  static ExactScalar from_rat(const Rat& q);

  bool is_zero() const { return sign == 0; }
  bool is_rational() const { return radical.empty(); }
  bool is_one() const { return sign == 1 && coeff == 1 && radical.empty(); }

  // signed rational value; requires is_rational()
  Rat rat_value() const;

  double to_double() const;
  std::string str() const;

  bool operator==(const ExactScalar& o) const {
    return sign == o.sign && coeff == o.coeff && radical == o.radical;
  }
  bool operator!=(const ExactScalar& o) const { return !(*this == o); }
};

enum class Cmp { Less, Equal, Greater };

// Dyadic enclosure lo <= value <= hi at the given working precision.
struct ScalarInterval {
  Rat lo;
  Rat hi;
  int precision_bits = 53;
};

// Canonicalize sign * coeff * prod base^exp with integer bases >= 2.
// Errors: base < 2 (ZeroBase), coeff < 0 (NegativeCoeff).
ExactScalar normalize(int sign, const Rat& coeff,
                      const std::vector<std::pair<i64, Rat>>& base_exponent_pairs);

// Canonicalize from per-prime exponents (bases need not be prime / exponents
// may be integers); internal building block shared by every operation.
ExactScalar make_canonical(int sign, Rat coeff_abs, std::map<i64, Rat> prime_exp);

// decompose is the inverse of normalize on canonical values.
std::tuple<int, Rat, std::vector<std::pair<i64, Rat>>> decompose(const ExactScalar& x);

ExactScalar mul(const ExactScalar& a, const ExactScalar& b);
ExactScalar inv(const ExactScalar& a);  // DivisionByZero on zero
ExactScalar div(const ExactScalar& a, const ExactScalar& b);
ExactScalar neg(const ExactScalar& a);
ExactScalar abs(const ExactScalar& a);

// Exact sum when the radical parts coincide (or an operand is zero);
// std::nullopt = NotClosed, caller falls back to intervals.
std::optional<ExactScalar> add(const ExactScalar& a, const ExactScalar& b);

// Exact sum of many parts, grouped by radical monomial: engaged whenever the
// nonzero groups collapse to a single monomial (zeros allowed).
std::optional<ExactScalar> sum_all(const std::vector<ExactScalar>& parts);

// a^e, integer exponent
ExactScalar pow_int(const ExactScalar& a, i64 e);
// base^e for rational base > 0 and rational exponent
ExactScalar pow_rat(const Rat& base, const Rat& e);

// Total order; Equal iff canonical forms are identical. Non-equal values are
// separated by interval refinement doubling from 53 to 4096 bits
// (PrecisionCapExceeded beyond the cap).
Cmp compare(const ExactScalar& a, const ExactScalar& b);

inline bool lt(const ExactScalar& a, const ExactScalar& b) { return compare(a, b) == Cmp::Less; }
inline bool gt(const ExactScalar& a, const ExactScalar& b) { return compare(a, b) == Cmp::Greater; }

ScalarInterval eval_interval(const ExactScalar& x, int precision_bits);

// Scalar literal: ['-'] INT ['/' INT] { '*' INT '^' '(' INT '/' INT ')' }
ExactScalar parse_scalar(std::string_view text);

}  // namespace framemul
