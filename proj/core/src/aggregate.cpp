#include "framemul/aggregate.hpp"

#include <map>
#include <utility>

#include "framemul/poly.hpp"

namespace framemul {

namespace {

bool group_alive(const SpecGroup& g) {
  if (g.entries.empty()) return false;
  return !(g.repeat.a == 0 && g.repeat.b == 0);
}

void check_alignment(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                     const BlockSequenceSpec& psi) {
  auto fail = [](const char* what) { throw Error(Error::ShapeMismatch, what); };
  if (m.prelude.size() != phi.prelude.size() || m.prelude.size() != psi.prelude.size())
    fail("prelude lengths differ");
  if (m.t_start != phi.t_start || m.t_start != psi.t_start) fail("block starts differ");
  if (m.groups.size() != phi.groups.size() || m.groups.size() != psi.groups.size())
    fail("group counts differ");
  for (size_t i = 0; i < m.groups.size(); ++i) {
    const auto &gm = m.groups[i], &gp = phi.groups[i], &gq = psi.groups[i];
    if (!(gm.repeat == gp.repeat) || !(gm.repeat == gq.repeat)) fail("repeat shapes differ");
    if (gm.phase_mod != gp.phase_mod || gm.phase_mod != gq.phase_mod ||
        gm.phase_res != gp.phase_res || gm.phase_res != gq.phase_res)
      fail("phase restrictions differ");
    if (gm.entries.size() != gp.entries.size() || gm.entries.size() != gq.entries.size())
      fail("entry counts differ");
  }
  for (const auto& pe : m.prelude)
    if (pe.index != 0) fail("symbol prelude entry carries a basis index");
  for (const auto& g : m.groups)
    for (const auto& e : g.entries)
      if (e.has_index()) fail("symbol entry carries a basis index");
  for (const auto* s : {&phi, &psi}) {
    for (const auto& pe : s->prelude)
      if (pe.index < 1) fail("sequence prelude entry without a basis index");
    for (const auto& g : s->groups)
      for (const auto& e : g.entries)
        if (!e.has_index()) fail("sequence entry without a basis index");
  }
}

bool is_const(const Affine& a) { return a.a == 0; }

void detect_pattern(AggregateOperator& op) {
  bool other = false;
  std::optional<i64> arow, acol;
  for (const auto& f : op.families) {
    bool rc = is_const(f.row), cc = is_const(f.col);
    if (rc == cc) continue;
    if (rc) {
      if (arow && *arow != f.row.b) other = true;
      arow = f.row.b;
    } else {
      if (acol && *acol != f.col.b) other = true;
      acol = f.col.b;
    }
  }
  // single cells and moving families must stay on the diagonal or inside an
  // anchor line
  auto placed = [&](i64 r, i64 c) {
    if (r == c) return true;
    if (arow && r == *arow) return true;
    if (acol && c == *acol) return true;
    return false;
  };
  for (const auto& fc : op.fixed)
    if (!placed(fc.row, fc.col)) other = true;
  for (const auto& f : op.families) {
    bool rc = is_const(f.row), cc = is_const(f.col);
    if (rc && cc) {
      if (!placed(f.row.b, f.col.b)) other = true;
    } else if (!rc && !cc) {
      if (!(f.row == f.col)) other = true;
    }
  }
  if (other) {
    op.pattern = CellPattern::Other;
    return;
  }
  if (arow && acol) {
    op.pattern = CellPattern::AnchorRowAndColumn;
    op.anchor_row = *arow;
    op.anchor_col = *acol;
  } else if (arow) {
    op.pattern = CellPattern::AnchorRow;
    op.anchor_row = *arow;
  } else if (acol) {
    op.pattern = CellPattern::AnchorColumn;
    op.anchor_col = *acol;
  } else {
    op.pattern = CellPattern::Diagonal;
  }
}

}  // namespace

AggregateOperator build_aggregates(const BlockSequenceSpec& m,
                                   const BlockSequenceSpec& phi,
                                   const BlockSequenceSpec& psi) {
  check_alignment(m, phi, psi);
  AggregateOperator op;
  for (size_t i = 0; i < m.prelude.size(); ++i) {
    FixedCell fc;
    fc.value = mul(m.prelude[i].value, mul(phi.prelude[i].value, psi.prelude[i].value));
    fc.row = phi.prelude[i].index;
    fc.col = psi.prelude[i].index;
    op.fixed.push_back(std::move(fc));
  }
  for (size_t gi = 0; gi < m.groups.size(); ++gi) {
    const auto &gm = m.groups[gi], &gp = phi.groups[gi], &gq = psi.groups[gi];
    if (!group_alive(gp)) continue;
    i64 p0 = gp.phase_mod;
    i64 r0 = first_admissible(phi, gp) - p0;
    for (size_t ei = 0; ei < gp.entries.size(); ++ei) {
      TermExpr prod =
          tmul(gm.entries[ei].weight, tmul(gp.entries[ei].weight, gq.entries[ei].weight));
      prod.count = gp.repeat;
      CellFamily cf;
      cf.term = tsubst(prod, p0, r0);
      const Affine& ri = gp.entries[ei].index;
      const Affine& ci = gq.entries[ei].index;
      cf.row = Affine{ri.a * p0, ri.a * r0 + ri.b};
      cf.col = Affine{ci.a * p0, ci.a * r0 + ci.b};
      cf.block = Affine{p0, r0};
      op.families.push_back(std::move(cf));
    }
  }
  detect_pattern(op);
  return op;
}

namespace {

struct CellPieces {
  std::vector<ExactScalar> finite;  // consumed single values, count folded in
  std::vector<TermExpr> series;     // whole block series landing on this cell
};

CellPieces collect_cell(const AggregateOperator& op, i64 r, i64 c) {
  CellPieces out;
  for (const auto& fc : op.fixed)
    if (fc.row == r && fc.col == c) out.finite.push_back(fc.value);
  for (const auto& f : op.families) {
    bool rc = is_const(f.row), cc = is_const(f.col);
    if (rc && cc) {
      if (f.row.b == r && f.col.b == c) out.series.push_back(f.term);
      continue;
    }
    i64 u;
    if (!rc) {
      if ((r - f.row.b) % f.row.a != 0) continue;
      u = (r - f.row.b) / f.row.a;
      if (u < 1 || f.col.at(u) != c) continue;
    } else {
      if ((c - f.col.b) % f.col.a != 0) continue;
      u = (c - f.col.b) / f.col.a;
      if (u < 1 || f.row.at(u) != r) continue;
    }
    out.finite.push_back(eval_at(f.term, u));
  }
  return out;
}

Extremum exact_extremum(const ExactScalar& v) {
  Extremum e;
  e.value = v;
  return e;
}

// drop series pairs that are exact sign twins of each other
void cancel_twins(std::vector<TermExpr>& s) {
  std::vector<bool> used(s.size(), false);
  for (size_t i = 0; i < s.size(); ++i) {
    if (used[i]) continue;
    for (size_t j = i + 1; j < s.size(); ++j) {
      if (used[j]) continue;
      if (s[i] == tneg(s[j])) {
        used[i] = used[j] = true;
        break;
      }
    }
  }
  std::vector<TermExpr> kept;
  for (size_t i = 0; i < s.size(); ++i)
    if (!used[i]) kept.push_back(std::move(s[i]));
  s = std::move(kept);
}

Extremum cell_from_pieces(std::vector<ExactScalar> finite, std::vector<TermExpr> series) {
  std::vector<Extremum> pieces;
  if (auto sa = sum_all(finite)) {
    if (!sa->is_zero() || series.empty()) pieces.push_back(exact_extremum(*sa));
  } else {
    for (const auto& v : finite) pieces.push_back(exact_extremum(v));
  }
  for (const auto& t : series) pieces.push_back(series_value(t));
  if (pieces.empty()) return exact_extremum(ExactScalar::zero());
  return combine_sum(pieces);
}

}  // namespace

Extremum cell_signed(const AggregateOperator& op, i64 row, i64 col) {
  CellPieces cp = collect_cell(op, row, col);
  cancel_twins(cp.series);
  return cell_from_pieces(std::move(cp.finite), std::move(cp.series));
}

Extremum cell_absolute(const AggregateOperator& op, i64 row, i64 col) {
  CellPieces cp = collect_cell(op, row, col);
  std::vector<ExactScalar> fin;
  std::vector<TermExpr> ser;
  for (const auto& v : cp.finite) fin.push_back(abs(v));
  for (const auto& t : cp.series) ser.push_back(tabs(t));
  return cell_from_pieces(std::move(fin), std::move(ser));
}

DiagonalView diagonal_view(const AggregateOperator& op) {
  DiagonalView dv;
  dv.pure = true;
  int sgn = 0;
  bool uniform = true;
  auto upd = [&](int s) {
    if (s == 0) return;
    if (sgn == 0)
      sgn = s;
    else if (sgn != s)
      uniform = false;
  };
  auto cross_value = [&](const CellFamily& f, i64 u) {
    if (u < 1) return;
    ExactScalar v = eval_at(f.term, u);
    upd(v.sign);
    dv.absolute.fixed[f.row.at(u)].push_back(abs(v));
  };
  for (const auto& fc : op.fixed) {
    if (fc.row != fc.col) {
      dv.pure = false;
      continue;
    }
    upd(fc.value.sign);
    dv.absolute.fixed[fc.row].push_back(abs(fc.value));
  }
  for (const auto& f : op.families) {
    bool rc = is_const(f.row), cc = is_const(f.col);
    if (rc && cc) {
      if (f.row.b == f.col.b) {
        upd(f.term.constant.sign);
        dv.absolute.anchors[f.row.b].push_back(tabs(f.term));
      } else {
        dv.pure = false;
      }
    } else if (!rc && !cc) {
      if (f.row == f.col) {
        upd(f.term.constant.sign);
        dv.absolute.families.push_back(make_family(tabs(f.term), f.row));
      } else {
        dv.pure = false;
        // distinct affine lines meet the diagonal in at most one block
        if (f.row.a != f.col.a && (f.col.b - f.row.b) % (f.row.a - f.col.a) == 0)
          cross_value(f, (f.col.b - f.row.b) / (f.row.a - f.col.a));
      }
    } else {
      dv.pure = false;
      const Affine& mov = rc ? f.col : f.row;
      i64 b = rc ? f.row.b : f.col.b;
      if ((b - mov.b) % mov.a == 0) cross_value(f, (b - mov.b) / mov.a);
    }
  }
  dv.uniform_sign = uniform;
  dv.sign = uniform ? sgn : 0;
  return dv;
}

namespace {

// num/den polynomial form of a term; engaged only for rational constants,
// integer exponents, and no geometric part
struct RatForm {
  Poly num, den;
};

std::optional<RatForm> as_rational(const TermExpr& e0) {
  TermExpr e = fold_count(e0);
  RatForm rf;
  rf.den = Poly::constant(Rat(1));
  if (e.is_zero()) {
    rf.num = Poly::zero();
    return rf;
  }
  if (!e.geo.is_one()) return std::nullopt;
  if (!e.constant.is_rational()) return std::nullopt;
  rf.num = Poly::constant(e.constant.rat_value());
  for (const auto& f : e.powers) {
    if (f.q.get_den() != 1) return std::nullopt;
    if (::abs(f.q.get_num()) > 64) return std::nullopt;
    i64 q = f.q.get_num().get_si();
    Poly base = Poly::affine(Rat(1), f.r);
    if (q > 0)
      rf.num = pmul(rf.num, ppow(base, q));
    else
      rf.den = pmul(rf.den, ppow(base, -q));
  }
  return rf;
}

bool sum_equals_rational(const TermSum& terms, const TermExpr& target) {
  Poly num = Poly::zero();
  Poly den = Poly::constant(Rat(1));
  for (const auto& t : terms) {
    auto r = as_rational(t);
    if (!r) return false;
    num = padd(pmul(num, r->den), pmul(r->num, den));
    den = pmul(den, r->den);
  }
  auto tg = as_rational(target);
  if (!tg) return false;
  return pequal(pmul(num, tg->den), pmul(tg->num, den));
}

// shared core of the exact diagonal-operator tests; power == 0 is the identity
bool equals_diagonal(const AggregateOperator& op, i64 power) {
  CoefficientProfile dp;  // signed diagonal contributions
  std::vector<const CellFamily*> off;
  std::map<std::pair<i64, i64>, std::vector<ExactScalar>> off_cells;
  for (const auto& fc : op.fixed) {
    if (fc.row == fc.col)
      dp.fixed[fc.row].push_back(fc.value);
    else
      off_cells[{fc.row, fc.col}].push_back(fc.value);
  }
  for (const auto& f : op.families) {
    bool rc = is_const(f.row), cc = is_const(f.col);
    if (rc && cc && f.row.b == f.col.b)
      dp.anchors[f.row.b].push_back(f.term);
    else if (!rc && !cc && f.row == f.col)
      dp.families.push_back(make_family(f.term, f.row));
    else
      off.push_back(&f);
  }
  // off-diagonal families must cancel in exact sign-twin pairs
  std::vector<bool> used(off.size(), false);
  for (size_t i = 0; i < off.size(); ++i) {
    if (used[i]) continue;
    for (size_t j = i + 1; j < off.size(); ++j) {
      if (used[j]) continue;
      if (off[i]->row == off[j]->row && off[i]->col == off[j]->col &&
          off[i]->term == tneg(off[j]->term)) {
        used[i] = used[j] = true;
        break;
      }
    }
  }
  for (bool u : used)
    if (!u) return false;
  for (const auto& [cell, vals] : off_cells) {
    auto s = sum_all(vals);
    if (!s || !s->is_zero()) return false;
  }

  Coverage cov = profile_coverage(dp);
  if (!cov.complete) return false;

  ResidueSystem rs = residue_system(dp);
  for (const auto& r : rs.residues) {
    TermExpr target;
    if (power == 0) {
      target = te_const(ExactScalar::one());
    } else {
      Rat lpow = rat_pow(Rat(static_cast<long>(rs.L)), power);
      target.constant = ExactScalar::from_rat(Rat(1) / lpow);
      Rat shift(static_cast<long>(r.k_shift), static_cast<long>(rs.L));
      shift.canonicalize();
      target.powers.push_back({shift, Rat(static_cast<long>(-power))});
      target = te_canonical(std::move(target));
    }
    if (!sum_equals_rational(r.terms, target)) return false;
  }
  for (i64 k = 1; k <= rs.K_ex; ++k) {
    std::vector<ExactScalar> vals;
    if (auto it = dp.fixed.find(k); it != dp.fixed.end())
      for (const auto& v : it->second) vals.push_back(v);
    if (auto it = dp.anchors.find(k); it != dp.anchors.end())
      for (const auto& t : it->second) {
        Extremum e = series_value(t);
        if (e.unbounded) return false;
        if (!e.exact)
          throw Error(Error::ValueUnknown, "diagonal cell value has no closed form");
        vals.push_back(e.value);
      }
    for (const auto& f : dp.families) {
      if (((k - f.B) % f.A) != 0) continue;
      i64 u = (k - f.B) / f.A;
      if (u < 1) continue;
      vals.push_back(eval_at(f.term, u));
    }
    auto s = sum_all(vals);
    if (!s) return false;
    ExactScalar want = pow_int(ExactScalar::from_int(k), -power);
    if (!(*s == want)) return false;
  }
  return true;
}

}  // namespace

bool equals_identity(const AggregateOperator& op) { return equals_diagonal(op, 0); }

bool equals_diagonal_power(const AggregateOperator& op, i64 power) {
  if (power < 1) throw Error(Error::SyntaxError, "power must be >= 1");
  return equals_diagonal(op, power);
}

}  // namespace framemul
