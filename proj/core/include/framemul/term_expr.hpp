#pragma once

#include <optional>
#include <string>
#include <vector>

#include "framemul/exact_scalar.hpp"

namespace framemul {

// (t + r)^q with rational r, q; valid factors stay positive on the domain t >= 1
struct PowerFactor {
  Rat r;
  Rat q;
  bool operator==(const PowerFactor& o) const { return r == o.r && q == o.q; }
};

// integer affine a*t + b
struct Affine {
  i64 a = 0;
  i64 b = 1;
  i64 at(i64 t) const { return a * t + b; }
  bool trivial() const { return a == 0 && b == 1; }
  bool operator==(const Affine& o) const { return a == o.a && b == o.b; }
};

// term(t) = constant * prod_i (t + r_i)^{q_i} * geo^t * count(t), t = 1, 2, ...
// Canonical: powers sorted by r with nonzero exponents, geo positive (one() when
// absent), zero represented by constant == 0 with empty powers and geo == one().
struct TermExpr {
  ExactScalar constant = ExactScalar::one();
  std::vector<PowerFactor> powers;
  ExactScalar geo = ExactScalar::one();
  Affine count{0, 1};

  bool is_zero() const { return constant.is_zero(); }
  bool count_free() const { return count.trivial(); }
  bool operator==(const TermExpr& o) const {
    return constant == o.constant && powers == o.powers && geo == o.geo && count == o.count;
  }
};

TermExpr te_const(const ExactScalar& c);
TermExpr te_canonical(TermExpr e);

// product / quotient of count-free terms
TermExpr tmul(const TermExpr& a, const TermExpr& b);
TermExpr tdiv(const TermExpr& a, const TermExpr& b);
TermExpr tneg(const TermExpr& a);
TermExpr tabs(const TermExpr& a);

// multiply the count factor into constant/powers, leaving count == 1
TermExpr fold_count(const TermExpr& e);

ExactScalar eval_at(const TermExpr& e, i64 t);

// substitute t = p*u + r0 (p >= 1); result is a term in u over u >= 1
TermExpr tsubst(const TermExpr& e, i64 p, i64 r0);

enum class LimitKind { Zero, Finite, Infinite };
struct Limit {
  LimitKind kind;
  ExactScalar value;  // Finite only
};

// limit of |term(t)| as t -> infinity (count folded in first)
Limit limit_abs(const TermExpr& e);

// sum of power exponents (+1 if count has degree 1)
Rat effective_degree(const TermExpr& e);

std::string te_str(const TermExpr& e);

}  // namespace framemul
