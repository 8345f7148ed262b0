#pragma once

#include <optional>
#include <string>
#include <vector>

#include "framemul/aggregate.hpp"
#include "framemul/classify.hpp"
#include "framemul/sequence_spec.hpp"

namespace framemul {

enum class UcVerdict { Yes, No, NotWellDefined, Unknown };
enum class InvVerdict { Invertible, NotInvertible, Unknown };

enum class Rule {
  BesselBesselBounded,
  RescalingWitness,
  PatternBounded,
  NotUC_NBB_NotBessel,
  NotUC_BothNBB_Unbounded,
  NotWellDefined_Riesz,
  Inv_Identity,
  Inv_DiagonalSN,
  Inv_TwoRieszSN,
  NonInv_RangeGap,
  NonInv_NotInjective,
  NonInv_BesselNonFrame,
  NonInv_RieszCriterion,
  NonInv_RieszVsOvercomplete,
};

const char* rule_name(Rule r);

// one certified inference step: the rule plus the checked facts it consumed
struct Certificate {
  Rule rule;
  std::vector<std::string> premises;
  std::string witness;  // counterexample or construction, when the rule has one
};

// Rescaling data nu, c, d with xi = c*phi, theta = d*psi and m = nu*c*d; all
// five are symbol-shaped specs aligned with the analyzed triple.
struct RescalingWitness {
  BlockSequenceSpec nu;
  BlockSequenceSpec xi;
  BlockSequenceSpec theta;
  BlockSequenceSpec c;
  BlockSequenceSpec d;
};

// verifies the three identities entrywise and exactly
bool check_rescaling_witness(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                             const BlockSequenceSpec& psi, const RescalingWitness& w);

struct UcResult {
  UcVerdict verdict = UcVerdict::Unknown;
  std::optional<Certificate> cert;
};

struct InvResult {
  InvVerdict verdict = InvVerdict::Unknown;
  std::optional<Certificate> cert;
  bool skipped = false;  // true when the operator was not well defined
};

struct AnalysisResult {
  UcResult uc;
  InvResult inv;
};

// InvalidWitness when a provided witness fails its defining identities
UcResult decide_unconditional(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                              const BlockSequenceSpec& psi,
                              const RescalingWitness* witness = nullptr);

InvResult decide_invertibility(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                               const BlockSequenceSpec& psi);

// unconditional convergence first; invertibility is skipped for operators
// that are not well defined
AnalysisResult analyze(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                       const BlockSequenceSpec& psi,
                       const RescalingWitness* witness = nullptr);

std::string verdict_str(UcVerdict v);
std::string verdict_str(InvVerdict v);

// deterministic report (sorted keys, two-space indent)
std::string analysis_json(const std::string& case_id, const AnalysisResult& r);

}  // namespace framemul
