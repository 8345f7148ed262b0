#include "framemul/series.hpp"

#include <algorithm>
#include <limits>

#include "framemul/poly.hpp"

namespace framemul {

namespace {

Rat dyadic_hi(const ExactScalar& x, int bits = 96) { return eval_interval(x, bits).hi; }

Rat dyadic_lo(const ExactScalar& x, int bits = 96) { return eval_interval(x, bits).lo; }

// rational w with g < w < 1, for certified geometric envelopes (g < 1)
Rat rational_above(const ExactScalar& g) {
  for (int bits = 53; bits <= 4096; bits *= 2) {
    Rat hi = eval_interval(g, bits).hi;
    Rat w = (hi + 1) / 2;
    if (compare(ExactScalar::from_rat(w), ExactScalar::one()) == Cmp::Less &&
        compare(g, ExactScalar::from_rat(w)) == Cmp::Less)
      return w;
  }
  throw Error(Error::PrecisionCapExceeded, "no rational majorant below 1");
}

Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

// product over selected factors of (1 + 1/(t+r))^n with integer n, as a rational
Rat envelope_at(const std::vector<std::pair<Rat, i64>>& factors, i64 t) {
  Rat acc(1);
  for (const auto& [r, n] : factors) {
    Rat base = 1 + Rat(1) / (Rat(static_cast<long>(t)) + r);
    acc *= rat_pow(base, n);
  }
  return acc;
}

}  // namespace

// first integer t with t + r > 0 for every power factor
i64 pole_threshold(const TermExpr& e) {
  i64 t = 1;
  for (const auto& f : e.powers) {
    i64 cand = rat_floor(-f.r).get_si() + 1;
    t = std::max(t, cand);
  }
  return t;
}

MonotoneInfo monotone_threshold(const TermExpr& e) {
  if (!e.count_free()) throw Error(Error::ShapeMismatch, "monotone_threshold: fold count first");
  MonotoneInfo info;
  Cmp g = compare(e.geo, ExactScalar::one());
  if (e.powers.empty()) {
    info.threshold = 1;
    info.dir = g == Cmp::Equal ? Direction::Flat
                               : (g == Cmp::Less ? Direction::NonInc : Direction::NonDec);
    return info;
  }
  i64 t_pos = pole_threshold(e);
  if (g == Cmp::Equal) {
    // ratio bounds: log rho(t) in [L(t), U(t)] with
    //   L = sum_{q>0} q/(t+r+1) + sum_{q<0} q/(t+r)
    //   U = sum_{q>0} q/(t+r)   + sum_{q<0} q/(t+r+1)
    auto build = [&](bool lower) {
      Poly num = Poly::zero();
      Poly den = Poly::constant(Rat(1));
      std::vector<Poly> dens;
      for (const auto& f : e.powers) {
        bool shift = lower ? f.q > 0 : f.q < 0;
        Poly d = Poly::affine(Rat(1), f.r + (shift ? 1 : 0));
        dens.push_back(d);
        den = pmul(den, d);
      }
      for (size_t i = 0; i < e.powers.size(); ++i) {
        Poly others = Poly::constant(e.powers[i].q);
        for (size_t j = 0; j < dens.size(); ++j)
          if (j != i) others = pmul(others, dens[j]);
        num = padd(num, others);
      }
      return num;
    };
    Poly lnum = build(true);
    Poly unum = build(false);
    if (lnum.is_zero() || (!lnum.is_zero() && lnum.lead() > 0)) {
      info.threshold = std::max(t_pos, lnum.is_zero() ? i64(1) : sign_threshold(lnum));
      info.dir = Direction::NonDec;
      return info;
    }
    if (unum.is_zero() || unum.lead() < 0) {
      info.threshold = std::max(t_pos, unum.is_zero() ? i64(1) : sign_threshold(unum));
      info.dir = Direction::NonInc;
      return info;
    }
    throw Error(Error::ValueUnknown, "monotone_threshold: undecided direction for " + te_str(e));
  }
  // g != 1: envelope scan with integer-exponent majorant/minorant
  std::vector<std::pair<Rat, i64>> factors;
  if (g == Cmp::Less) {
    for (const auto& f : e.powers)
      if (f.q > 0) factors.emplace_back(f.r, rat_ceil(f.q).get_si());
  } else {
    for (const auto& f : e.powers)
      if (f.q < 0) factors.emplace_back(f.r, rat_floor(f.q).get_si());
  }
  for (i64 t = t_pos; t <= (i64(1) << 40); t *= 2) {
    ExactScalar envelope = mul(e.geo, ExactScalar::from_rat(envelope_at(factors, t)));
    Cmp c = compare(envelope, ExactScalar::one());
    if (g == Cmp::Less && c == Cmp::Less) {
      info.threshold = t;
      info.dir = Direction::NonInc;
      return info;
    }
    if (g == Cmp::Greater && c == Cmp::Greater) {
      info.threshold = t;
      info.dir = Direction::NonDec;
      return info;
    }
  }
  throw Error(Error::ValueUnknown, "monotone_threshold: envelope scan exhausted");
}

double Extremum::to_double() const {
  if (unbounded) return std::numeric_limits<double>::infinity();
  if (exact) return value.to_double();
  return (lo.get_d() + hi.get_d()) / 2;
}

namespace {

struct ScanBest {
  bool has = false;
  ExactScalar v;
  void consider(const ExactScalar& x, bool want_max) {
    if (!has) {
      v = x;
      has = true;
      return;
    }
    Cmp c = compare(x, v);
    if ((want_max && c == Cmp::Greater) || (!want_max && c == Cmp::Less)) v = x;
  }
};

Extremum exact_extremum(const ExactScalar& v) {
  Extremum e;
  e.exact = true;
  e.value = v;
  return e;
}

// extremum of a single count-free magnitude over t >= 1 minus excluded points
Extremum single_extremum(const TermExpr& mag, bool want_sup, const std::set<i64>& excl) {
  if (mag.is_zero()) return exact_extremum(ExactScalar::zero());
  MonotoneInfo mono = monotone_threshold(mag);
  Limit lim = limit_abs(mag);
  i64 anchor = mono.threshold;
  if (!excl.empty()) anchor = std::max(anchor, *excl.rbegin() + 1);
  ScanBest best;
  for (i64 t = 1; t <= anchor; ++t) {
    if (excl.count(t)) continue;
    best.consider(eval_at(mag, t), want_sup);
  }
  // tail (anchor, infinity): monotone, so bounded by value at anchor and limit
  if (want_sup) {
    if (mono.dir == Direction::NonDec) {
      if (lim.kind == LimitKind::Infinite) {
        Extremum e;
        e.unbounded = true;
        e.exact = true;
        return e;
      }
      if (lim.kind == LimitKind::Finite) best.consider(lim.value, true);
    }
    // NonInc/Flat: tail sup = value at anchor, already scanned
  } else {
    if (mono.dir == Direction::NonInc) {
      if (lim.kind == LimitKind::Zero) best.consider(ExactScalar::zero(), false);
      if (lim.kind == LimitKind::Finite) best.consider(lim.value, false);
    }
  }
  if (!best.has) return exact_extremum(ExactScalar::zero());
  return exact_extremum(best.v);
}

}  // namespace

Extremum term_sup(const TermExpr& e) {
  if (!e.count_free()) throw Error(Error::ShapeMismatch, "term_sup: count must be 1");
  return single_extremum(tabs(e), true, {});
}

Extremum term_inf(const TermExpr& e) {
  if (!e.count_free()) throw Error(Error::ShapeMismatch, "term_inf: count must be 1");
  return single_extremum(tabs(e), false, {});
}

SeriesVerdict classify_series(const TermExpr& e0) {
  TermExpr mag = fold_count(tabs(e0));
  SeriesVerdict v;
  if (mag.is_zero()) {
    v.status = SeriesVerdict::Status::ConvergesTo;
    v.value = ExactScalar::zero();
    v.tail = [](i64) { return Rat(0); };
    return v;
  }
  i64 t_pos = pole_threshold(mag);
  for (i64 t = 1; t < t_pos; ++t) {
    if (!eval_at(e0, t).is_zero())
      throw Error(Error::ValueUnknown, "classify_series: nonzero term before factor domain");
  }
  Cmp g = compare(mag.geo, ExactScalar::one());
  Rat d = effective_degree(mag);
  if (g == Cmp::Greater || (g == Cmp::Equal && d >= -1)) {
    v.status = SeriesVerdict::Status::Diverges;
    return v;
  }
  if (g == Cmp::Equal) {
    // p-series regime, d < -1: |term(t)| <= C * t^d for t >= t_pos
    ExactScalar c_bound = abs(mag.constant);
    for (const auto& f : mag.powers) {
      bool worst_at_start = (f.q > 0 && f.r > 0) || (f.q < 0 && f.r < 0);
      if (worst_at_start) {
        Rat ratio = (Rat(static_cast<long>(t_pos)) + f.r) / Rat(static_cast<long>(t_pos));
        c_bound = mul(c_bound, pow_rat(ratio, f.q));
      }
    }
    Rat cap = dyadic_hi(c_bound);
    v.status = SeriesVerdict::Status::Finite;
    v.tail = [cap, d, t_pos](i64 T) -> Rat {
      // sum_{t>T} C t^d <= C((T+1)^d + (T+1)^{d+1}/(-d-1)), decreasing terms
      Rat t1(static_cast<long>(std::max(T, t_pos - 1) + 1));
      Rat head = dyadic_hi(pow_rat(t1, d));
      Rat integral = dyadic_hi(pow_rat(t1, d + 1)) / (-d - 1);
      return cap * (head + integral);
    };
    return v;
  }
  // g < 1
  if (mag.powers.empty()) {
    if (mag.geo.is_rational()) {
      Rat gr = mag.geo.rat_value();
      v.status = SeriesVerdict::Status::ConvergesTo;
      // sign of the true series: constant sign times g^t (positive)
      ExactScalar c = e0.count_free() ? e0.constant : fold_count(e0).constant;
      v.value = mul(c, ExactScalar::from_rat(gr / (1 - gr)));
      Rat cup = dyadic_hi(abs(c));
      v.tail = [cup, gr](i64 T) -> Rat { return cup * rat_pow(gr, T + 1) / (1 - gr); };
      return v;
    }
    Rat w = rational_above(mag.geo);
    Rat cup = dyadic_hi(mag.constant);
    v.status = SeriesVerdict::Status::Finite;
    v.tail = [cup, w](i64 T) -> Rat { return cup * rat_pow(w, T + 1) / (1 - w); };
    return v;
  }
  // g < 1 with polynomial part: envelope C_w * w^t over t >= t_pos
  Rat w = rational_above(mag.geo);
  TermExpr aux = mag;
  aux.geo = div(mag.geo, ExactScalar::from_rat(w));
  std::set<i64> excl;
  for (i64 t = 1; t < t_pos; ++t) excl.insert(t);
  Extremum cw = single_extremum(te_canonical(std::move(aux)), true, excl);
  Rat cup = cw.exact ? dyadic_hi(cw.value) : cw.hi;
  v.status = SeriesVerdict::Status::Finite;
  v.tail = [cup, w, t_pos](i64 T) -> Rat {
    return cup * rat_pow(w, std::max(T, t_pos - 1) + 1) / (1 - w);
  };
  return v;
}

ExactScalar partial_sum(const TermExpr& e, i64 T) {
  std::map<std::map<i64, Rat>, Rat> groups;
  for (i64 t = 1; t <= T; ++t) {
    ExactScalar v = eval_at(e, t);
    if (v.is_zero()) continue;
    groups[v.radical] += Rat(v.sign) * v.coeff;
  }
  for (auto it = groups.begin(); it != groups.end();) {
    if (it->second == 0)
      it = groups.erase(it);
    else
      ++it;
  }
  if (groups.empty()) return ExactScalar::zero();
  if (groups.size() > 1)
    throw Error(Error::HeterogeneousRadicals,
                "partial_sum: terms span several radical monomials");
  const auto& [rad, q] = *groups.begin();
  return make_canonical(sgn_rat(q), ::abs(q), rad);
}

ScalarInterval partial_sum_interval(const TermExpr& e, i64 T, int precision_bits) {
  ScalarInterval acc{Rat(0), Rat(0), precision_bits};
  for (i64 t = 1; t <= T; ++t) {
    ScalarInterval iv = eval_interval(eval_at(e, t), precision_bits);
    acc.lo += iv.lo;
    acc.hi += iv.hi;
  }
  return acc;
}

std::optional<ExactScalar> sum_value_at(const TermSum& s, i64 t) {
  ExactScalar acc = ExactScalar::zero();
  for (const auto& e : s) {
    auto r = add(acc, eval_at(e, t));
    if (!r) return std::nullopt;
    acc = *r;
  }
  return acc;
}

ScalarInterval sum_interval_at(const TermSum& s, i64 t, int precision_bits) {
  ScalarInterval acc{Rat(0), Rat(0), precision_bits};
  for (const auto& e : s) {
    ScalarInterval iv = eval_interval(eval_at(e, t), precision_bits);
    acc.lo += iv.lo;
    acc.hi += iv.hi;
  }
  return acc;
}

namespace {

Extremum sum_extremum(const TermSum& s0, bool want_sup, const std::set<i64>& excl) {
  TermSum s;       // analysis forms (count folded into the factors)
  TermSum orig;    // evaluation forms (count kept, safe on the zero prefix)
  for (const auto& e : s0) {
    TermExpr f = fold_count(e);
    if (f.is_zero()) continue;
    s.push_back(std::move(f));
    orig.push_back(e);
  }
  if (s.empty()) return exact_extremum(ExactScalar::zero());
  if (s.size() == 1 && orig[0].count_free()) return single_extremum(s[0], want_sup, excl);

  i64 anchor = 1;
  std::vector<MonotoneInfo> mono;
  std::vector<Limit> lims;
  bool limit_infinite = false;
  for (const auto& e : s) {
    MonotoneInfo m = monotone_threshold(e);
    mono.push_back(m);
    Limit l = limit_abs(e);
    lims.push_back(l);
    if (l.kind == LimitKind::Infinite) limit_infinite = true;
    anchor = std::max(anchor, m.threshold);
  }
  if (!excl.empty()) anchor = std::max(anchor, *excl.rbegin() + 1);

  if (want_sup && limit_infinite) {
    Extremum e;
    e.unbounded = true;
    return e;
  }

  // scan [1, anchor]
  ScanBest best;
  bool scan_exact = true;
  Rat scan_lo(0), scan_hi(0);
  bool scan_has = false;
  for (i64 t = 1; t <= anchor; ++t) {
    if (excl.count(t)) continue;
    auto v = sum_value_at(orig, t);
    if (v) {
      best.consider(*v, want_sup);
    } else {
      scan_exact = false;
      ScalarInterval iv = sum_interval_at(orig, t, 192);
      if (!scan_has) {
        scan_lo = iv.lo;
        scan_hi = iv.hi;
        scan_has = true;
      } else if (want_sup) {
        scan_lo = std::max(scan_lo, iv.lo);
        scan_hi = std::max(scan_hi, iv.hi);
      } else {
        scan_lo = std::min(scan_lo, iv.lo);
        scan_hi = std::min(scan_hi, iv.hi);
      }
    }
  }

  // tail over (anchor, infinity): each term is monotone there
  ExactScalar limit_sum = ExactScalar::zero();
  bool limit_exact = true;
  Rat limit_hi(0);
  for (const auto& l : lims) {
    if (l.kind == LimitKind::Finite) {
      auto r = add(limit_sum, l.value);
      if (r)
        limit_sum = *r;
      else {
        limit_exact = false;
        limit_hi += dyadic_hi(l.value);
      }
    }
  }

  // per-term tail extrema
  ExactScalar tail_outer = ExactScalar::zero();  // sum of per-term extrema (outer bound)
  bool outer_exact = true;
  Rat outer_dy(0);
  for (size_t i = 0; i < s.size(); ++i) {
    ExactScalar at_anchor = eval_at(orig[i], anchor);
    ExactScalar cand;
    if (lims[i].kind == LimitKind::Finite) {
      Cmp c = compare(at_anchor, lims[i].value);
      bool anchor_wins = want_sup ? (c != Cmp::Less) : (c != Cmp::Greater);
      cand = anchor_wins ? at_anchor : lims[i].value;
    } else if (lims[i].kind == LimitKind::Zero) {
      cand = want_sup ? at_anchor : ExactScalar::zero();
    } else {  // Infinite, only reachable for inf
      cand = at_anchor;
    }
    auto r = add(tail_outer, cand);
    if (r)
      tail_outer = *r;
    else {
      outer_exact = false;
      outer_dy += want_sup ? dyadic_hi(cand) : dyadic_lo(cand);
    }
  }

  // inner bound: value attained at the anchor or approached at the limit
  auto at_anchor_sum = sum_value_at(orig, anchor);
  Extremum result;
  if (scan_exact && outer_exact && limit_exact && at_anchor_sum) {
    ExactScalar inner = *at_anchor_sum;
    Cmp c = compare(inner, limit_sum);
    if (want_sup ? (c == Cmp::Less) : (c == Cmp::Greater)) inner = limit_sum;
    if (compare(inner, tail_outer) == Cmp::Equal) {
      best.consider(inner, want_sup);
      return exact_extremum(best.has ? best.v : inner);
    }
    // bracket tail between inner and outer
    Rat blo = want_sup ? dyadic_lo(inner) : dyadic_lo(tail_outer);
    Rat bhi = want_sup ? dyadic_hi(tail_outer) : dyadic_hi(inner);
    if (best.has) {
      Rat slo = dyadic_lo(best.v), shi = dyadic_hi(best.v);
      if (want_sup) {
        blo = std::max(blo, slo);
        bhi = std::max(bhi, shi);
      } else {
        blo = std::min(blo, slo);
        bhi = std::min(bhi, shi);
      }
    }
    Extremum e;
    e.exact = false;
    e.lo = blo;
    e.hi = bhi;
    return e;
  }
  // interval fallback
  ScalarInterval anchor_iv = sum_interval_at(orig, anchor, 192);
  Rat blo = want_sup ? anchor_iv.lo : (outer_exact ? dyadic_lo(tail_outer) : outer_dy);
  Rat bhi = want_sup ? (outer_exact ? dyadic_hi(tail_outer) : outer_dy) : anchor_iv.hi;
  if (scan_has) {
    if (want_sup) {
      blo = std::max(blo, scan_lo);
      bhi = std::max(bhi, scan_hi);
    } else {
      blo = std::min(blo, scan_lo);
      bhi = std::min(bhi, scan_hi);
    }
  }
  if (best.has) {
    Rat slo = dyadic_lo(best.v), shi = dyadic_hi(best.v);
    if (want_sup) {
      blo = std::max(blo, slo);
      bhi = std::max(bhi, shi);
    } else {
      blo = std::min(blo, slo);
      bhi = std::min(bhi, shi);
    }
  }
  Extremum e;
  e.exact = false;
  e.lo = blo;
  e.hi = bhi;
  return e;
}

}  // namespace

namespace {

Extremum combine_dir(const std::vector<Extremum>& candidates, bool want_max) {
  if (candidates.empty()) throw Error(Error::ShapeMismatch, "combine: empty candidate list");
  std::vector<Extremum> xs;
  for (const auto& x : candidates) {
    if (!x.unbounded) {
      xs.push_back(x);
      continue;
    }
    // an infinite candidate decides the max outright; for the min it can
    // never win unless every candidate is infinite
    if (want_max) return x;
  }
  if (xs.empty()) return candidates.front();
  // try an exact winner that dominates every other candidate
  for (size_t j = 0; j < xs.size(); ++j) {
    if (!xs[j].exact) continue;
    bool wins = true;
    for (size_t i = 0; i < xs.size() && wins; ++i) {
      if (i == j) continue;
      if (xs[i].exact) {
        Cmp c = compare(xs[j].value, xs[i].value);
        wins = want_max ? c != Cmp::Less : c != Cmp::Greater;
      } else {
        Rat edge = want_max ? xs[i].hi : xs[i].lo;
        Cmp c = compare(xs[j].value, ExactScalar::from_rat(edge));
        wins = want_max ? c != Cmp::Less : c != Cmp::Greater;
      }
    }
    if (wins) return xs[j];
  }
  bool first = true;
  Rat lo(0), hi(0);
  for (const auto& x : xs) {
    Rat xlo = x.exact ? dyadic_lo(x.value) : x.lo;
    Rat xhi = x.exact ? dyadic_hi(x.value) : x.hi;
    if (first) {
      lo = xlo;
      hi = xhi;
      first = false;
    } else if (want_max) {
      lo = std::max(lo, xlo);
      hi = std::max(hi, xhi);
    } else {
      lo = std::min(lo, xlo);
      hi = std::min(hi, xhi);
    }
  }
  Extremum e;
  e.exact = false;
  e.lo = lo;
  e.hi = hi;
  return e;
}

}  // namespace

Extremum combine_max(const std::vector<Extremum>& xs) { return combine_dir(xs, true); }

Extremum combine_min(const std::vector<Extremum>& xs) { return combine_dir(xs, false); }

Extremum sum_sup(const TermSum& s, const std::set<i64>& exclude_t) {
  return sum_extremum(s, true, exclude_t);
}

Extremum sum_inf(const TermSum& s, const std::set<i64>& exclude_t) {
  return sum_extremum(s, false, exclude_t);
}

Extremum series_value(const TermExpr& e) {
  Extremum r;
  if (e.is_zero()) {
    r.value = ExactScalar::zero();
    return r;
  }
  TermExpr a = tabs(e);
  SeriesVerdict v = classify_series(a);
  if (!v.converges()) {
    r.unbounded = true;
    r.exact = false;
    return r;
  }
  bool negative = e.constant.sign < 0;
  if (v.status == SeriesVerdict::Status::ConvergesTo) {
    r.value = negative ? neg(v.value) : v.value;
    return r;
  }
  i64 T = 64;
  Rat eps(Int(1), Int(1) << 48);
  while (T < 16384 && v.tail(T) > eps) T <<= 1;
  ScalarInterval iv = partial_sum_interval(a, T, 256);
  r.exact = false;
  r.lo = iv.lo;
  r.hi = Rat(iv.hi + v.tail(T));
  if (negative) {
    Rat lo = Rat(-r.hi), hi = Rat(-r.lo);
    r.lo = lo;
    r.hi = hi;
  }
  return r;
}

Extremum combine_sum(const std::vector<Extremum>& pieces) {
  for (const auto& p : pieces)
    if (p.unbounded) {
      Extremum e;
      e.unbounded = true;
      e.exact = false;
      return e;
    }
  bool all_exact = true;
  ExactScalar acc = ExactScalar::zero();
  for (const auto& p : pieces) {
    if (!p.exact) {
      all_exact = false;
      break;
    }
    auto s = add(acc, p.value);
    if (!s) {
      all_exact = false;
      break;
    }
    acc = *s;
  }
  if (all_exact) {
    Extremum e;
    e.value = acc;
    return e;
  }
  Extremum e;
  e.exact = false;
  e.lo = 0;
  e.hi = 0;
  for (const auto& p : pieces) {
    if (p.exact) {
      ScalarInterval iv = eval_interval(p.value, 256);
      e.lo += iv.lo;
      e.hi += iv.hi;
    } else {
      e.lo += p.lo;
      e.hi += p.hi;
    }
  }
  return e;
}

}  // namespace framemul
