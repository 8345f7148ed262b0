#include "framemul/classify.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace framemul {

namespace {

i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i64 ceil_div(i64 a, i64 b) { return -floor_div(-a, b); }

i64 pos_mod(i64 a, i64 m) { return ((a % m) + m) % m; }

// first u >= 1 with count(u) >= 1; validation keeps counts nonnegative, so
// this is 1 or the end of the zero prefix
i64 count_u_min(const Affine& c) {
  if (c.a == 0) return 1;
  return std::max<i64>(1, ceil_div(1 - c.b, c.a));
}

bool group_alive(const SpecGroup& g) {
  if (g.entries.empty()) return false;
  return !(g.repeat.a == 0 && g.repeat.b == 0);
}

void require_indexed(const BlockSequenceSpec& spec) {
  for (const auto& pe : spec.prelude)
    if (pe.index < 1)
      throw Error(Error::ShapeMismatch, "sequence prelude entry without a basis index");
  for (const auto& g : spec.groups)
    for (const auto& e : g.entries)
      if (!e.has_index())
        throw Error(Error::ShapeMismatch, "sequence entry without a basis index");
}

// substitution data for one group: block t = p0*u + r0, u >= 1
struct GroupSubst {
  i64 p0 = 1;
  i64 r0 = 0;
};

GroupSubst group_subst(const BlockSequenceSpec& spec, const SpecGroup& g) {
  GroupSubst s;
  s.p0 = g.phase_mod;
  s.r0 = first_admissible(spec, g) - g.phase_mod;
  return s;
}

Extremum exact_extremum(const ExactScalar& v) {
  Extremum e;
  e.exact = true;
  e.value = v;
  return e;
}

// positivity of a nonnegative extremum; undecidable brackets are an error
bool decide_positive(const Extremum& e, const char* what) {
  if (e.unbounded) return true;
  if (e.exact) return e.value.sign > 0;
  if (e.lo > 0) return true;
  if (e.hi <= 0) return false;
  throw Error(Error::ValueUnknown,
              std::string(what) + ": certified bracket straddles zero");
}

}  // namespace

CoefficientProfile coefficient_profile(const BlockSequenceSpec& spec) {
  require_indexed(spec);
  CoefficientProfile p;
  for (const auto& pe : spec.prelude)
    p.fixed[pe.index].push_back(mul(pe.value, pe.value));
  for (const auto& g : spec.groups) {
    if (!group_alive(g)) continue;
    GroupSubst gs = group_subst(spec, g);
    for (const auto& entry : g.entries) {
      TermExpr sq = tmul(entry.weight, entry.weight);
      sq.count = g.repeat;
      TermExpr squ = tsubst(sq, gs.p0, gs.r0);
      Affine idx{entry.index.a * gs.p0, entry.index.a * gs.r0 + entry.index.b};
      if (idx.a == 0) {
        p.anchors[idx.b].push_back(squ);
      } else {
        p.families.push_back(make_family(squ, idx));
      }
    }
  }
  return p;
}

IndexFamily make_family(const TermExpr& term_u, const Affine& index_u) {
  IndexFamily f;
  f.A = index_u.a;
  f.B = index_u.b;
  f.u_min = count_u_min(term_u.count);
  f.multi = term_u.count.a > 0 || term_u.count.b >= 2;
  f.term = term_u;
  return f;
}

Extremum profile_value_at(const CoefficientProfile& p, i64 k) {
  std::vector<Extremum> pieces;
  if (auto it = p.fixed.find(k); it != p.fixed.end())
    for (const auto& v : it->second) pieces.push_back(exact_extremum(v));
  if (auto it = p.anchors.find(k); it != p.anchors.end())
    for (const auto& term : it->second) pieces.push_back(series_value(term));
  for (const auto& f : p.families) {
    if (pos_mod(k - f.B, f.A) != 0) continue;
    i64 u = (k - f.B) / f.A;
    if (u < 1) continue;
    pieces.push_back(exact_extremum(eval_at(f.term, u)));
  }
  if (pieces.empty()) return exact_extremum(ExactScalar::zero());
  return combine_sum(pieces);
}

Coverage profile_coverage(const CoefficientProfile& p) {
  Coverage cov;
  i64 L = 1;
  for (const auto& f : p.families) L = std::lcm(L, f.A);
  if (L > 1000000) throw Error(Error::ValueUnknown, "index stride lcm too large");

  std::vector<bool> res_hit(L, false);
  for (const auto& f : p.families)
    for (i64 j = 0; j < L / f.A; ++j) res_hit[pos_mod(f.B + j * f.A, L)] = true;

  i64 K = L;
  if (!p.fixed.empty()) K = std::max(K, p.fixed.rbegin()->first);
  if (!p.anchors.empty()) K = std::max(K, p.anchors.rbegin()->first);
  for (const auto& f : p.families) K = std::max(K, f.A * f.u_min + f.B);

  auto hit = [&](i64 k) {
    if (p.fixed.count(k) || p.anchors.count(k)) return true;
    for (const auto& f : p.families) {
      if (pos_mod(k - f.B, f.A) != 0) continue;
      if ((k - f.B) / f.A >= f.u_min) return true;
    }
    return false;
  };
  for (i64 k = 1; k <= K; ++k)
    if (!hit(k) && static_cast<i64>(cov.missing.size()) < 8) cov.missing.push_back(k);
  for (i64 rho = 0; rho < L; ++rho)
    if (!res_hit[rho]) cov.cofinite_missing = true;
  if (cov.cofinite_missing)
    for (i64 k = K + 1; k <= K + L && static_cast<i64>(cov.missing.size()) < 8; ++k)
      if (!res_hit[k % L]) cov.missing.push_back(k);
  cov.complete = cov.missing.empty() && !cov.cofinite_missing;
  return cov;
}

Coverage index_coverage(const BlockSequenceSpec& spec) {
  return profile_coverage(coefficient_profile(spec));
}

bool sigma_injective(const BlockSequenceSpec& spec) {
  CoefficientProfile p = coefficient_profile(spec);
  if (!p.anchors.empty()) return false;
  for (const auto& [k, vals] : p.fixed)
    if (vals.size() >= 2) return false;
  for (const auto& f : p.families)
    if (f.multi) return false;
  for (const auto& [k, vals] : p.fixed)
    for (const auto& f : p.families) {
      if (pos_mod(k - f.B, f.A) != 0) continue;
      if ((k - f.B) / f.A >= f.u_min) return false;
    }
  for (size_t i = 0; i < p.families.size(); ++i)
    for (size_t j = i + 1; j < p.families.size(); ++j) {
      i64 g = std::gcd(p.families[i].A, p.families[j].A);
      if (pos_mod(p.families[j].B - p.families[i].B, g) == 0) return false;
    }
  return true;
}

namespace {

// per-entry magnitude data: |weight| in the block parameter u plus the u's
// with zero repeat count (excluded from extrema)
struct MagnitudePiece {
  TermExpr mag;
  std::set<i64> excl;
};

std::vector<MagnitudePiece> magnitude_pieces(const BlockSequenceSpec& spec) {
  std::vector<MagnitudePiece> out;
  for (const auto& g : spec.groups) {
    if (!group_alive(g)) continue;
    GroupSubst gs = group_subst(spec, g);
    Affine cu{g.repeat.a * gs.p0, g.repeat.a * gs.r0 + g.repeat.b};
    std::set<i64> excl;
    for (i64 u = 1; u < count_u_min(cu); ++u) excl.insert(u);
    for (const auto& entry : g.entries)
      out.push_back({tsubst(tabs(entry.weight), gs.p0, gs.r0), excl});
  }
  return out;
}

}  // namespace

Extremum weight_sup(const BlockSequenceSpec& spec) {
  std::vector<Extremum> cands;
  for (const auto& pe : spec.prelude) cands.push_back(exact_extremum(abs(pe.value)));
  for (const auto& mp : magnitude_pieces(spec)) cands.push_back(sum_sup({mp.mag}, mp.excl));
  if (cands.empty()) throw Error(Error::ValueUnknown, "sequence emits no entries");
  return combine_max(cands);
}

Extremum weight_inf(const BlockSequenceSpec& spec) {
  std::vector<Extremum> cands;
  for (const auto& pe : spec.prelude) cands.push_back(exact_extremum(abs(pe.value)));
  for (const auto& mp : magnitude_pieces(spec)) cands.push_back(sum_inf({mp.mag}, mp.excl));
  if (cands.empty()) throw Error(Error::ValueUnknown, "sequence emits no entries");
  return combine_min(cands);
}

ResidueSystem residue_system(const CoefficientProfile& p) {
  ResidueSystem rs;
  for (const auto& f : p.families) rs.L = std::lcm(rs.L, f.A);
  if (rs.L > 1000000) throw Error(Error::ValueUnknown, "index stride lcm too large");

  i64 K0 = 0;
  if (!p.fixed.empty()) K0 = std::max(K0, p.fixed.rbegin()->first);
  if (!p.anchors.empty()) K0 = std::max(K0, p.anchors.rbegin()->first);
  rs.K_ex = K0;
  for (i64 rho = 0; rho < rs.L; ++rho) {
    struct Sel {
      const IndexFamily* f;
      i64 P, R;
    };
    std::vector<Sel> sel;
    for (const auto& f : p.families)
      if (pos_mod(rho - f.B, f.A) == 0)
        sel.push_back({&f, rs.L / f.A, (rho - f.B) / f.A});
    if (sel.empty()) continue;
    i64 v_lo = 1;
    for (const auto& s : sel) v_lo = std::max(v_lo, ceil_div(s.f->u_min - s.R, s.P));
    v_lo = std::max(v_lo, floor_div(K0 - rho, rs.L) + 1);
    ResidueSystem::Residue r;
    r.rho = rho;
    r.k_shift = rs.L * (v_lo - 1) + rho;
    for (const auto& s : sel)
      r.terms.push_back(tsubst(s.f->term, s.P, s.R + s.P * (v_lo - 1)));
    rs.K_ex = std::max(rs.K_ex, rs.L * v_lo + rho - 1);
    rs.residues.push_back(std::move(r));
  }
  return rs;
}

void profile_extrema(const CoefficientProfile& p, bool include_zero,
                     Extremum& out_sup, Extremum& out_inf) {
  ResidueSystem rs = residue_system(p);
  std::vector<Extremum> sup_cands, inf_cands;
  for (const auto& r : rs.residues) {
    sup_cands.push_back(sum_sup(r.terms));
    inf_cands.push_back(sum_inf(r.terms));
  }
  for (i64 k = 1; k <= rs.K_ex; ++k) {
    Extremum e = profile_value_at(p, k);
    sup_cands.push_back(e);
    inf_cands.push_back(e);
  }
  if (include_zero) {
    sup_cands.push_back(exact_extremum(ExactScalar::zero()));
    inf_cands.push_back(exact_extremum(ExactScalar::zero()));
  }
  if (sup_cands.empty()) {
    out_sup = exact_extremum(ExactScalar::zero());
    out_inf = exact_extremum(ExactScalar::zero());
    return;
  }
  out_sup = combine_max(sup_cands);
  out_inf = combine_min(inf_cands);
}

SequenceClass classify_sequence(const BlockSequenceSpec& spec) {
  CoefficientProfile p = coefficient_profile(spec);
  Coverage cov = profile_coverage(p);
  Extremum s_sup, s_inf;
  profile_extrema(p, !cov.complete, s_sup, s_inf);

  SequenceClass c;
  c.complete_support = cov.complete;
  c.bessel = !s_sup.unbounded;
  if (c.bessel && s_sup.exact) c.bessel_bound = s_sup.value;
  if (c.bessel && c.complete_support &&
      decide_positive(s_inf, "lower frame bound")) {
    c.frame = true;
    if (s_inf.exact) c.frame_lower = s_inf.value;
    if (s_sup.exact) c.frame_upper = s_sup.value;
  }

  Extremum w_sup = weight_sup(spec);
  Extremum w_inf = weight_inf(spec);
  c.nba = !w_sup.unbounded;
  c.nbb = decide_positive(w_inf, "weight infimum");
  c.norm_sn = c.nba && c.nbb;
  c.riesz = sigma_injective(spec) && c.complete_support && c.norm_sn;
  if (c.riesz && !c.frame)
    throw Error(Error::SelfConsistency, "basis-equivalent sequence failed the frame test");
  if (c.frame && !c.bessel)
    throw Error(Error::SelfConsistency, "frame verdict without an upper bound");
  return c;
}

SymbolClass classify_symbol(const BlockSequenceSpec& spec) {
  for (const auto& pe : spec.prelude)
    if (pe.index != 0)
      throw Error(Error::ShapeMismatch, "symbol prelude entry carries a basis index");
  for (const auto& g : spec.groups)
    for (const auto& e : g.entries)
      if (e.has_index())
        throw Error(Error::ShapeMismatch, "symbol entry carries a basis index");
  SymbolClass s;
  s.sup = weight_sup(spec);
  s.inf = weight_inf(spec);
  if (s.sup.unbounded)
    s.kind = SymbolKind::Unbounded;
  else
    s.kind = decide_positive(s.inf, "symbol infimum") ? SymbolKind::SN
                                                      : SymbolKind::BoundedNotSN;
  return s;
}

}  // namespace framemul
