#include "framemul/term_expr.hpp"

#include <algorithm>
#include <sstream>

namespace framemul {

TermExpr te_const(const ExactScalar& c) {
  TermExpr e;
  e.constant = c;
  return te_canonical(e);
}

TermExpr te_canonical(TermExpr e) {
  if (e.constant.is_zero() || e.geo.is_zero() || (e.count.a == 0 && e.count.b == 0)) {
    TermExpr z;
    z.constant = ExactScalar::zero();
    return z;
  }
  std::sort(e.powers.begin(), e.powers.end(),
            [](const PowerFactor& x, const PowerFactor& y) { return x.r < y.r; });
  std::vector<PowerFactor> merged;
  for (const auto& f : e.powers) {
    if (!merged.empty() && merged.back().r == f.r) {
      merged.back().q += f.q;
    } else {
      merged.push_back(f);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const PowerFactor& f) { return f.q == 0; }),
               merged.end());
  e.powers = std::move(merged);
  if (e.geo.is_one()) e.geo = ExactScalar::one();
  return e;
}

TermExpr tmul(const TermExpr& a, const TermExpr& b) {
  if (!a.count_free() || !b.count_free())
    throw Error(Error::ShapeMismatch, "tmul: count-free terms expected");
  TermExpr e;
  e.constant = mul(a.constant, b.constant);
  e.powers = a.powers;
  e.powers.insert(e.powers.end(), b.powers.begin(), b.powers.end());
  e.geo = mul(a.geo, b.geo);
  return te_canonical(std::move(e));
}

TermExpr tdiv(const TermExpr& a, const TermExpr& b) {
  if (!a.count_free() || !b.count_free())
    throw Error(Error::ShapeMismatch, "tdiv: count-free terms expected");
  if (b.is_zero()) throw Error(Error::DivisionByZero, "tdiv by zero term");
  TermExpr e;
  e.constant = div(a.constant, b.constant);
  e.powers = a.powers;
  for (const auto& f : b.powers) e.powers.push_back({f.r, -f.q});
  e.geo = div(a.geo, b.geo);
  return te_canonical(std::move(e));
}

TermExpr tneg(const TermExpr& a) {
  TermExpr e = a;
  e.constant = neg(e.constant);
  return e;
}

TermExpr tabs(const TermExpr& a) {
  TermExpr e = a;
  e.constant = abs(e.constant);
  return e;
}

TermExpr fold_count(const TermExpr& e) {
  if (e.count_free()) return e;
  TermExpr r = e;
  r.count = Affine{0, 1};
  if (e.count.a == 0) {
    if (e.count.b < 0) throw Error(Error::NegativeRepeat, "negative count");
    r.constant = mul(r.constant, ExactScalar::from_int(e.count.b));
  } else {
    r.constant = mul(r.constant, ExactScalar::from_int(e.count.a));
    Rat rr(static_cast<long>(e.count.b), static_cast<long>(e.count.a));
    rr.canonicalize();
    r.powers.push_back({rr, Rat(1)});
  }
  return te_canonical(std::move(r));
}

ExactScalar eval_at(const TermExpr& e, i64 t) {
  if (e.is_zero()) return ExactScalar::zero();
  i64 c = 1;
  if (!e.count.trivial()) {
    c = e.count.at(t);
    if (c < 0) throw Error(Error::NegativeRepeat, "negative count at t=" + std::to_string(t));
    if (c == 0) return ExactScalar::zero();
  }
  ExactScalar acc = e.constant;
  for (const auto& f : e.powers) {
    Rat base = Rat(static_cast<long>(t)) + f.r;
    if (base == 0 && f.q > 0) return ExactScalar::zero();
    if (base <= 0)
      throw Error(Error::SyntaxError, "term factor nonpositive at t=" + std::to_string(t));
    acc = mul(acc, pow_rat(base, f.q));
  }
  if (!e.geo.is_one()) acc = mul(acc, pow_int(e.geo, t));
  if (c != 1) acc = mul(acc, ExactScalar::from_int(c));
  return acc;
}

TermExpr tsubst(const TermExpr& e, i64 p, i64 r0) {
  if (p < 1) throw Error(Error::SyntaxError, "tsubst: p must be >= 1");
  if (e.is_zero()) return e;
  TermExpr r;
  r.constant = e.constant;
  for (const auto& f : e.powers) {
    r.constant = mul(r.constant, pow_rat(Rat(static_cast<long>(p)), f.q));
    Rat nr = (Rat(static_cast<long>(r0)) + f.r) / Rat(static_cast<long>(p));
    nr.canonicalize();
    r.powers.push_back({nr, f.q});
  }
  if (!e.geo.is_one()) {
    r.constant = mul(r.constant, pow_int(e.geo, r0));
    r.geo = pow_int(e.geo, p);
  }
  r.count = Affine{e.count.a * p, e.count.a * r0 + e.count.b};
  return te_canonical(std::move(r));
}

Rat effective_degree(const TermExpr& e) {
  Rat d(0);
  for (const auto& f : e.powers) d += f.q;
  if (e.count.a != 0) d += 1;
  return d;
}

Limit limit_abs(const TermExpr& e0) {
  if (e0.is_zero()) return {LimitKind::Finite, ExactScalar::zero()};
  TermExpr e = fold_count(e0);
  Cmp g = compare(e.geo, ExactScalar::one());
  Rat d = effective_degree(e);
  if (g == Cmp::Greater) return {LimitKind::Infinite, {}};
  if (g == Cmp::Less) return {LimitKind::Zero, {}};
  if (d > 0) return {LimitKind::Infinite, {}};
  if (d < 0) return {LimitKind::Zero, {}};
  return {LimitKind::Finite, abs(e.constant)};
}

std::string te_str(const TermExpr& e) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  os << e.constant.str();
  for (const auto& f : e.powers) {
    os << "*(t+" << f.r.get_str() << ")^(" << f.q.get_str() << ")";
  }
  if (!e.geo.is_one()) os << "*(" << e.geo.str() << ")^t";
  if (!e.count.trivial()) os << "*count(" << e.count.a << "t+" << e.count.b << ")";
  return os.str();
}

}  // namespace framemul
