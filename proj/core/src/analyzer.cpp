#include "framemul/analyzer.hpp"

#include <json.hpp>

#include "framemul/series.hpp"

namespace framemul {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::BesselBesselBounded: return "BesselBesselBounded";
    case Rule::RescalingWitness: return "RescalingWitness";
    case Rule::PatternBounded: return "PatternBounded";
    case Rule::NotUC_NBB_NotBessel: return "NotUC_NBB_NotBessel";
    case Rule::NotUC_BothNBB_Unbounded: return "NotUC_BothNBB_Unbounded";
    case Rule::NotWellDefined_Riesz: return "NotWellDefined_Riesz";
    case Rule::Inv_Identity: return "Inv_Identity";
    case Rule::Inv_DiagonalSN: return "Inv_DiagonalSN";
    case Rule::Inv_TwoRieszSN: return "Inv_TwoRieszSN";
    case Rule::NonInv_RangeGap: return "NonInv_RangeGap";
    case Rule::NonInv_NotInjective: return "NonInv_NotInjective";
    case Rule::NonInv_BesselNonFrame: return "NonInv_BesselNonFrame";
    case Rule::NonInv_RieszCriterion: return "NonInv_RieszCriterion";
    case Rule::NonInv_RieszVsOvercomplete: return "NonInv_RieszVsOvercomplete";
  }
  return "?";
}

namespace {

// classification steps that cannot certify a value yield "absent", so the
// battery can fall through to the next rule instead of aborting
template <typename T, typename F>
std::optional<T> safely(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Error::ValueUnknown) return std::nullopt;
    throw;
  }
}

bool specs_equal(const BlockSequenceSpec& a, const BlockSequenceSpec& b) {
  if (a.prelude.size() != b.prelude.size() || a.t_start != b.t_start ||
      a.groups.size() != b.groups.size())
    return false;
  for (size_t i = 0; i < a.prelude.size(); ++i)
    if (!(a.prelude[i].value == b.prelude[i].value) || a.prelude[i].index != b.prelude[i].index)
      return false;
  for (size_t gi = 0; gi < a.groups.size(); ++gi) {
    const auto &ga = a.groups[gi], &gb = b.groups[gi];
    if (!(ga.repeat == gb.repeat) || ga.phase_mod != gb.phase_mod ||
        ga.phase_res != gb.phase_res || ga.entries.size() != gb.entries.size())
      return false;
    for (size_t ei = 0; ei < ga.entries.size(); ++ei)
      if (!(ga.entries[ei].weight == gb.entries[ei].weight) ||
          !(ga.entries[ei].index == gb.entries[ei].index))
        return false;
  }
  return true;
}

std::string seq_fact(const std::string& name, const char* what) { return name + " " + what; }

std::string folded_name(const BlockSequenceSpec& m, const BlockSequenceSpec& s) {
  return m.name + "*" + s.name;
}

std::optional<Certificate> pattern_certificate(const AggregateOperator& op) {
  if (op.pattern == CellPattern::Other) return std::nullopt;
  DiagonalView dv = diagonal_view(op);
  Extremum dsup, dinf;
  profile_extrema(dv.absolute, false, dsup, dinf);
  if (dsup.unbounded) return std::nullopt;
  bool has_line = false;
  for (const auto& f : op.families) {
    bool rc = f.row.a == 0, cc = f.col.a == 0;
    if (rc == cc) {
      if (rc && f.row.b != f.col.b &&
          !classify_series(tabs(f.term)).converges())
        return std::nullopt;
      continue;
    }
    has_line = true;
    TermExpr g = fold_count(tabs(f.term));
    if (!classify_series(tmul(g, g)).converges()) return std::nullopt;
  }
  Certificate c;
  c.rule = Rule::PatternBounded;
  switch (op.pattern) {
    case CellPattern::Diagonal:
      c.premises.push_back("absolute matrix is diagonal");
      break;
    case CellPattern::AnchorRow:
      c.premises.push_back("absolute matrix is diagonal plus row " +
                           std::to_string(op.anchor_row));
      break;
    case CellPattern::AnchorColumn:
      c.premises.push_back("absolute matrix is diagonal plus column " +
                           std::to_string(op.anchor_col));
      break;
    case CellPattern::AnchorRowAndColumn:
      c.premises.push_back("absolute matrix is diagonal plus row " +
                           std::to_string(op.anchor_row) + " and column " +
                           std::to_string(op.anchor_col));
      break;
    case CellPattern::Other:
      break;
  }
  c.premises.push_back("diagonal cell sums are uniformly bounded");
  if (has_line) c.premises.push_back("anchor line entries are square-summable");
  return c;
}

// exact column of the signed matrix as a finite sparse vector; disengaged
// when the column has infinite support or a value without closed form
std::optional<std::map<i64, ExactScalar>> column_vector(const AggregateOperator& op, i64 c) {
  std::map<i64, std::vector<ExactScalar>> parts;
  for (const auto& fc : op.fixed)
    if (fc.col == c) parts[fc.row].push_back(fc.value);
  for (const auto& f : op.families) {
    if (f.col.a == 0) {
      if (f.col.b != c) continue;
      if (f.row.a != 0) return std::nullopt;
      Extremum e = series_value(f.term);
      if (e.unbounded || !e.exact) return std::nullopt;
      parts[f.row.b].push_back(e.value);
    } else {
      if ((c - f.col.b) % f.col.a != 0) continue;
      i64 u = (c - f.col.b) / f.col.a;
      if (u < 1) continue;
      parts[f.row.at(u)].push_back(eval_at(f.term, u));
    }
  }
  std::map<i64, ExactScalar> out;
  for (const auto& [r, vs] : parts) {
    auto s = sum_all(vs);
    if (!s) return std::nullopt;
    if (!s->is_zero()) out[r] = *s;
  }
  return out;
}

}  // namespace

bool check_rescaling_witness(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                             const BlockSequenceSpec& psi, const RescalingWitness& w) {
  try {
    if (!specs_equal(w.xi, fold_symbol(w.c, phi))) return false;
    if (!specs_equal(w.theta, fold_symbol(w.d, psi))) return false;
    if (!specs_equal(m, fold_symbol(w.nu, fold_symbol(w.c, w.d)))) return false;
  } catch (const Error& e) {
    if (e.code() == Error::ShapeMismatch) return false;
    throw;
  }
  return true;
}

UcResult decide_unconditional(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                              const BlockSequenceSpec& psi, const RescalingWitness* witness) {
  AggregateOperator op = build_aggregates(m, phi, psi);
  auto cphi = safely<SequenceClass>([&] { return classify_sequence(phi); });
  auto cpsi = safely<SequenceClass>([&] { return classify_sequence(psi); });
  auto cmphi = safely<SequenceClass>([&] { return classify_sequence(fold_symbol(m, phi)); });
  auto cmpsi = safely<SequenceClass>([&] { return classify_sequence(fold_symbol(m, psi)); });
  auto cm = safely<SymbolClass>([&] { return classify_symbol(m); });

  UcResult r;
  auto fire = [&](UcVerdict v, Rule rule, std::vector<std::string> prem,
                  std::string wit = "") {
    r.verdict = v;
    r.cert = Certificate{rule, std::move(prem), std::move(wit)};
  };

  if (cphi && cmpsi && cphi->riesz && !cmpsi->bessel) {
    fire(UcVerdict::NotWellDefined, Rule::NotWellDefined_Riesz,
         {seq_fact(phi.name, "is a Riesz sequence"),
          seq_fact(folded_name(m, psi), "is not a Bessel sequence")});
    return r;
  }
  if (cpsi && cmphi && cpsi->riesz && !cmphi->bessel) {
    fire(UcVerdict::NotWellDefined, Rule::NotWellDefined_Riesz,
         {seq_fact(psi.name, "is a Riesz sequence"),
          seq_fact(folded_name(m, phi), "is not a Bessel sequence")});
    return r;
  }

  if (witness) {
    if (!check_rescaling_witness(m, phi, psi, *witness))
      throw Error(Error::InvalidWitness, "rescaling identities do not hold");
    auto cnu = safely<SymbolClass>([&] { return classify_symbol(witness->nu); });
    auto cxi = safely<SequenceClass>([&] { return classify_sequence(witness->xi); });
    auto cth = safely<SequenceClass>([&] { return classify_sequence(witness->theta); });
    if (cnu && cxi && cth && cnu->kind != SymbolKind::Unbounded && cxi->bessel &&
        cth->bessel) {
      fire(UcVerdict::Yes, Rule::RescalingWitness,
           {"rescaling identities verified exactly",
            seq_fact(witness->nu.name, "is a bounded symbol"),
            seq_fact(witness->xi.name, "is a Bessel sequence"),
            seq_fact(witness->theta.name, "is a Bessel sequence")});
      return r;
    }
  }

  if (cphi && cmpsi && cphi->bessel && cmpsi->bessel) {
    fire(UcVerdict::Yes, Rule::BesselBesselBounded,
         {seq_fact(phi.name, "is a Bessel sequence"),
          seq_fact(folded_name(m, psi), "is a Bessel sequence")});
    return r;
  }
  if (cpsi && cmphi && cpsi->bessel && cmphi->bessel) {
    fire(UcVerdict::Yes, Rule::BesselBesselBounded,
         {seq_fact(psi.name, "is a Bessel sequence"),
          seq_fact(folded_name(m, phi), "is a Bessel sequence")});
    return r;
  }

  if (auto c = safely<Certificate>([&] { return pattern_certificate(op); })) {
    r.verdict = UcVerdict::Yes;
    r.cert = *c;
    return r;
  }

  if (cphi && cmpsi && cphi->nbb && !cmpsi->bessel) {
    fire(UcVerdict::No, Rule::NotUC_NBB_NotBessel,
         {seq_fact(phi.name, "has norms bounded below"),
          seq_fact(folded_name(m, psi), "is not a Bessel sequence")});
    return r;
  }
  if (cpsi && cmphi && cpsi->nbb && !cmphi->bessel) {
    fire(UcVerdict::No, Rule::NotUC_NBB_NotBessel,
         {seq_fact(psi.name, "has norms bounded below"),
          seq_fact(folded_name(m, phi), "is not a Bessel sequence")});
    return r;
  }
  if (cphi && cpsi && cm && cphi->nbb && cpsi->nbb && cm->kind == SymbolKind::Unbounded) {
    fire(UcVerdict::No, Rule::NotUC_BothNBB_Unbounded,
         {seq_fact(phi.name, "has norms bounded below"),
          seq_fact(psi.name, "has norms bounded below"),
          seq_fact(m.name, "is an unbounded symbol")});
    return r;
  }
  return r;
}

InvResult decide_invertibility(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                               const BlockSequenceSpec& psi) {
  AggregateOperator op = build_aggregates(m, phi, psi);
  auto cphi = safely<SequenceClass>([&] { return classify_sequence(phi); });
  auto cpsi = safely<SequenceClass>([&] { return classify_sequence(psi); });
  auto cmphi = safely<SequenceClass>([&] { return classify_sequence(fold_symbol(m, phi)); });
  auto cmpsi = safely<SequenceClass>([&] { return classify_sequence(fold_symbol(m, psi)); });
  auto cm = safely<SymbolClass>([&] { return classify_symbol(m); });

  InvResult r;
  auto fire = [&](InvVerdict v, Rule rule, std::vector<std::string> prem,
                  std::string wit = "") {
    r.verdict = v;
    r.cert = Certificate{rule, std::move(prem), std::move(wit)};
  };

  if (safely<bool>([&] { return equals_identity(op); }).value_or(false)) {
    fire(InvVerdict::Invertible, Rule::Inv_Identity,
         {"signed cell sums equal the identity matrix exactly"});
    return r;
  }

  DiagonalView dv = diagonal_view(op);
  if (op.pattern == CellPattern::Diagonal && dv.uniform_sign) {
    Coverage cov = profile_coverage(dv.absolute);
    Extremum dsup, dinf;
    bool got = false;
    try {
      profile_extrema(dv.absolute, false, dsup, dinf);
      got = true;
    } catch (const Error& e) {
      if (e.code() != Error::ValueUnknown) throw;
    }
    if (cov.complete && got) {
      int inf_pos = -1;  // 1 positive, 0 zero, -1 undecided
      if (dinf.unbounded)
        inf_pos = 1;
      else if (dinf.exact)
        inf_pos = dinf.value.sign > 0 ? 1 : 0;
      else if (dinf.lo > 0)
        inf_pos = 1;
      else if (dinf.hi <= 0)
        inf_pos = 0;
      if (inf_pos == 1 && !dsup.unbounded) {
        fire(InvVerdict::Invertible, Rule::Inv_DiagonalSN,
             {"matrix is diagonal and every cell carries the same sign",
              "diagonal values are bounded away from zero and above",
              "every basis index is hit"});
        return r;
      }
      if (inf_pos == 0) {
        bool sq_sum = true;
        for (const auto& f : dv.absolute.families) {
          TermExpr g = fold_count(f.term);
          if (!classify_series(tmul(g, g)).converges()) sq_sum = false;
        }
        fire(InvVerdict::NotInvertible, Rule::NonInv_RangeGap,
             {"matrix is diagonal with nonzero cells of one sign",
              "infimum of the diagonal magnitudes is zero"},
             sq_sum ? "the square-summable diagonal vector itself has no preimage"
                    : "a normalized vector supported on small diagonal cells has no preimage");
        return r;
      }
    }
  }

  // mixed signs on the diagonal: cancellation can still leave an exact k^(-p)
  // diagonal, which has a range gap
  if (op.pattern == CellPattern::Diagonal && !dv.uniform_sign) {
    for (i64 p = 1; p <= 3; ++p) {
      if (safely<bool>([&] { return equals_diagonal_power(op, p); }).value_or(false)) {
        fire(InvVerdict::NotInvertible, Rule::NonInv_RangeGap,
             {"signed cell sums equal the diagonal matrix with entries k^(-" +
                  std::to_string(p) + ")",
              "infimum of the diagonal magnitudes is zero"},
             "the square-summable diagonal vector itself has no preimage");
        return r;
      }
    }
  }

  if (cm && cphi && cpsi && cm->kind == SymbolKind::SN && cphi->riesz && cpsi->riesz) {
    fire(InvVerdict::Invertible, Rule::Inv_TwoRieszSN,
         {seq_fact(m.name, "is a symbol bounded above and below"),
          seq_fact(phi.name, "is a Riesz basis"), seq_fact(psi.name, "is a Riesz basis")});
    return r;
  }

  {
    CoefficientProfile colp;
    for (const auto& fc : op.fixed) colp.fixed[fc.col].push_back(abs(fc.value));
    for (const auto& f : op.families) {
      if (f.col.a == 0)
        colp.anchors[f.col.b].push_back(tabs(f.term));
      else
        colp.families.push_back(make_family(tabs(f.term), f.col));
    }
    Coverage ccov = profile_coverage(colp);
    if (!ccov.complete && !ccov.missing.empty()) {
      i64 k = ccov.missing.front();
      fire(InvVerdict::NotInvertible, Rule::NonInv_NotInjective,
           {"column " + std::to_string(k) + " has no entries"},
           "M maps basis vector " + std::to_string(k) + " to zero");
      return r;
    }
    for (i64 c1 = 1; c1 <= 12 && !r.cert; ++c1) {
      auto v1 = column_vector(op, c1);
      if (!v1) continue;
      if (v1->empty()) {
        fire(InvVerdict::NotInvertible, Rule::NonInv_NotInjective,
             {"column " + std::to_string(c1) + " cancels to zero"},
             "M maps basis vector " + std::to_string(c1) + " to zero");
        return r;
      }
      for (i64 c2 = c1 + 1; c2 <= 12; ++c2) {
        auto v2 = column_vector(op, c2);
        if (!v2) continue;
        if (*v1 == *v2) {
          fire(InvVerdict::NotInvertible, Rule::NonInv_NotInjective,
               {"columns " + std::to_string(c1) + " and " + std::to_string(c2) +
                " agree entrywise"},
               "M annihilates the difference of basis vectors " + std::to_string(c1) +
                   " and " + std::to_string(c2));
          return r;
        }
      }
    }
  }

  if (cm && cphi && cpsi && cm->kind != SymbolKind::Unbounded && cphi->bessel &&
      cpsi->bessel && (!cphi->frame || !cpsi->frame)) {
    fire(InvVerdict::NotInvertible, Rule::NonInv_BesselNonFrame,
         {seq_fact(m.name, "is a bounded symbol"),
          "both sequences are Bessel",
          seq_fact(!cphi->frame ? phi.name : psi.name, "is not a frame")});
    return r;
  }
  // same contrapositive after folding the symbol into either side, which also
  // covers unbounded symbols whose folded sequence is Bessel
  if (cphi && cmpsi && cphi->bessel && cmpsi->bessel &&
      (!cphi->frame || !cmpsi->frame)) {
    fire(InvVerdict::NotInvertible, Rule::NonInv_BesselNonFrame,
         {seq_fact(phi.name, "is a Bessel sequence"),
          seq_fact(folded_name(m, psi), "is a Bessel sequence"),
          seq_fact(!cphi->frame ? phi.name : folded_name(m, psi), "is not a frame")});
    return r;
  }
  if (cpsi && cmphi && cpsi->bessel && cmphi->bessel &&
      (!cpsi->frame || !cmphi->frame)) {
    fire(InvVerdict::NotInvertible, Rule::NonInv_BesselNonFrame,
         {seq_fact(psi.name, "is a Bessel sequence"),
          seq_fact(folded_name(m, phi), "is a Bessel sequence"),
          seq_fact(!cpsi->frame ? psi.name : folded_name(m, phi), "is not a frame")});
    return r;
  }

  auto overcomplete = [](const SequenceClass& c) { return c.frame && !c.riesz; };
  if (cm && cphi && cpsi && cm->kind == SymbolKind::SN) {
    if (cphi->riesz && overcomplete(*cpsi)) {
      fire(InvVerdict::NotInvertible, Rule::NonInv_RieszVsOvercomplete,
           {seq_fact(phi.name, "is a Riesz basis"),
            seq_fact(psi.name, "is an overcomplete frame"),
            seq_fact(m.name, "is a symbol bounded above and below")},
           "operator is injective but not surjective");
      return r;
    }
    if (cpsi->riesz && overcomplete(*cphi)) {
      fire(InvVerdict::NotInvertible, Rule::NonInv_RieszVsOvercomplete,
           {seq_fact(psi.name, "is a Riesz basis"),
            seq_fact(phi.name, "is an overcomplete frame"),
            seq_fact(m.name, "is a symbol bounded above and below")},
           "operator is surjective but not injective");
      return r;
    }
  }

  if (cphi && cmpsi && cphi->riesz && !cmpsi->riesz) {
    fire(InvVerdict::NotInvertible, Rule::NonInv_RieszCriterion,
         {seq_fact(phi.name, "is a Riesz basis"),
          seq_fact(folded_name(m, psi), "is not a Riesz basis")});
    return r;
  }
  if (cpsi && cmphi && cpsi->riesz && !cmphi->riesz) {
    fire(InvVerdict::NotInvertible, Rule::NonInv_RieszCriterion,
         {seq_fact(psi.name, "is a Riesz basis"),
          seq_fact(folded_name(m, phi), "is not a Riesz basis")});
    return r;
  }

  return r;
}

AnalysisResult analyze(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                       const BlockSequenceSpec& psi, const RescalingWitness* witness) {
  AnalysisResult r;
  r.uc = decide_unconditional(m, phi, psi, witness);
  if (r.uc.verdict == UcVerdict::NotWellDefined) {
    r.inv.skipped = true;
    return r;
  }
  r.inv = decide_invertibility(m, phi, psi);
  return r;
}

std::string verdict_str(UcVerdict v) {
  switch (v) {
    case UcVerdict::Yes: return "yes";
    case UcVerdict::No: return "no";
    case UcVerdict::NotWellDefined: return "not-well-defined";
    case UcVerdict::Unknown: return "unknown";
  }
  return "?";
}

std::string verdict_str(InvVerdict v) {
  switch (v) {
    case InvVerdict::Invertible: return "yes";
    case InvVerdict::NotInvertible: return "no";
    case InvVerdict::Unknown: return "unknown";
  }
  return "?";
}

std::string analysis_json(const std::string& case_id, const AnalysisResult& r) {
  nlohmann::json j;
  j["case"] = case_id;
  j["uc"]["verdict"] = verdict_str(r.uc.verdict);
  if (r.uc.cert) {
    j["uc"]["rule"] = rule_name(r.uc.cert->rule);
    j["uc"]["premises"] = r.uc.cert->premises;
    if (!r.uc.cert->witness.empty()) j["uc"]["witness"] = r.uc.cert->witness;
  }
  j["invertibility"]["verdict"] =
      r.inv.skipped ? "not-applicable" : verdict_str(r.inv.verdict);
  if (r.inv.cert) {
    j["invertibility"]["rule"] = rule_name(r.inv.cert->rule);
    j["invertibility"]["premises"] = r.inv.cert->premises;
    if (!r.inv.cert->witness.empty()) j["invertibility"]["witness"] = r.inv.cert->witness;
  }
  return j.dump(2) + "\n";
}

}  // namespace framemul
