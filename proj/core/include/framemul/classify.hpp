#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "framemul/sequence_spec.hpp"
#include "framemul/series.hpp"

namespace framemul {

// One moving-index contribution: basis indices k = A*u + B over the block
// parameter u >= 1 (phases and block starts already folded into u).
struct IndexFamily {
  i64 A = 1;
  i64 B = 0;
  i64 u_min = 1;       // first u whose repeat count is >= 1
  bool multi = false;  // some block contributes the same index twice or more
  TermExpr term;       // squared-weight aggregate at u (repeat kept as count)
};

// Squared-weight aggregate S_k = sum of |c_n|^2 over entries with index k,
// split into prelude contributions, fixed-index block series, and moving
// families.
struct CoefficientProfile {
  std::map<i64, std::vector<ExactScalar>> fixed;
  std::map<i64, TermSum> anchors;
  std::vector<IndexFamily> families;
};

CoefficientProfile coefficient_profile(const BlockSequenceSpec& spec);

// family over index k = A*u + B with u_min/multi derived from the term count
IndexFamily make_family(const TermExpr& term_u, const Affine& index_u);

// S_k at one index: exact when every contributing series sums exactly,
// unbounded when a fixed-index series diverges
Extremum profile_value_at(const CoefficientProfile& p, i64 k);

// Decomposition of a profile beyond its irregular band: for each residue rho
// hit by some moving family, S_{L*v + k_shift} as a term-sum in v >= 1.
// Indices 1..K_ex are the irregular band and need pointwise evaluation.
struct ResidueSystem {
  i64 L = 1;
  i64 K_ex = 0;
  struct Residue {
    i64 rho = 0;
    i64 k_shift = 0;
    TermSum terms;
  };
  std::vector<Residue> residues;
};

ResidueSystem residue_system(const CoefficientProfile& p);

struct Coverage {
  bool complete = false;
  bool cofinite_missing = false;  // infinitely many indices are never hit
  std::vector<i64> missing;       // first few unhit indices (witnesses)
};

Coverage profile_coverage(const CoefficientProfile& p);
Coverage index_coverage(const BlockSequenceSpec& spec);

// sup / inf of S_k over k >= 1; include_zero adds the value 0 to the candidate
// set (unhit indices); zeros for an empty profile
void profile_extrema(const CoefficientProfile& p, bool include_zero,
                     Extremum& out_sup, Extremum& out_inf);

bool sigma_injective(const BlockSequenceSpec& spec);

// sup / inf of entry magnitudes |c_n| over the whole enumeration
Extremum weight_sup(const BlockSequenceSpec& spec);
Extremum weight_inf(const BlockSequenceSpec& spec);

struct SequenceClass {
  bool bessel = false;
  std::optional<ExactScalar> bessel_bound;  // engaged iff the bound is exact
  bool frame = false;
  std::optional<ExactScalar> frame_lower;
  std::optional<ExactScalar> frame_upper;
  bool riesz = false;
  bool nbb = false;
  bool nba = false;
  bool norm_sn = false;
  bool complete_support = false;
};

// Decision rules for weighted-basis sequences:
//   bessel  <=> sup_k S_k finite          (B = sup_k S_k)
//   frame   <=> bessel, inf_k S_k > 0, complete support   (A = inf_k S_k)
//   riesz   <=> injective index map, complete support, SN weights
SequenceClass classify_sequence(const BlockSequenceSpec& spec);

enum class SymbolKind { SN, BoundedNotSN, Unbounded };

struct SymbolClass {
  SymbolKind kind = SymbolKind::SN;
  Extremum sup;
  Extremum inf;
};

SymbolClass classify_symbol(const BlockSequenceSpec& spec);

}  // namespace framemul
