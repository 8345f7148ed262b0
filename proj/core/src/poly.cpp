#include "framemul/poly.hpp"

namespace framemul {

Poly Poly::constant(const Rat& v) {
  Poly p;
  if (v != 0) p.c = {v};
  return p;
}

Poly Poly::affine(const Rat& a, const Rat& b) {
  Poly p;
  p.c = {b, a};
  p.trim();
  return p;
}

void Poly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

Rat Poly::eval(const Rat& x) const {
  Rat acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly padd(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  r.trim();
  return r;
}

Poly psub(const Poly& a, const Poly& b) {
  Poly nb = b;
  for (auto& x : nb.c) x = -x;
  return padd(a, nb);
}

Poly pmul(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly::zero();
  Poly r;
  r.c.resize(a.c.size() + b.c.size() - 1, Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  r.trim();
  return r;
}

Poly ppow(const Poly& a, i64 e) {
  Poly acc = Poly::constant(Rat(1));
  Poly base = a;
  while (e > 0) {
    if (e & 1) acc = pmul(acc, base);
    base = pmul(base, base);
    e >>= 1;
  }
  return acc;
}

bool pequal(const Poly& a, const Poly& b) { return a.c == b.c; }

i64 sign_threshold(const Poly& p) {
  if (p.deg() <= 0) return 1;
  Rat bound(1);
  for (int i = 0; i < p.deg(); ++i) {
    Rat ratio = ::abs(p.c[i] / p.lead());
    if (ratio > bound - 1) bound = ratio + 1;
  }
  Int f = rat_floor(bound);
  i64 t = f.fits_slong_p() ? f.get_si() + 1 : 0;
  if (t < 1) t = 1;
  return t;
}

}  // namespace framemul
