#pragma once

#include <vector>

#include "framemul/rat.hpp"

namespace framemul {

// Dense univariate polynomial over the rationals; c[i] is the coefficient of x^i.
struct Poly {
  std::vector<Rat> c;

  static Poly zero() { return Poly{}; }
  static Poly constant(const Rat& v);
  static Poly affine(const Rat& a, const Rat& b);  // a x + b

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const Rat& lead() const { return c.back(); }
  Rat eval(const Rat& x) const;
  void trim();
};

Poly padd(const Poly& a, const Poly& b);
Poly psub(const Poly& a, const Poly& b);
Poly pmul(const Poly& a, const Poly& b);
Poly ppow(const Poly& a, i64 e);
bool pequal(const Poly& a, const Poly& b);

// Smallest integer T >= 1 such that sign(p(t)) equals sign(lead()) for every
// integer t >= T (Cauchy root bound). Zero polynomial returns 1.
i64 sign_threshold(const Poly& p);

}  // namespace framemul
