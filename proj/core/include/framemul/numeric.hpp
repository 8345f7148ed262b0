#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "framemul/aggregate.hpp"

namespace framemul {

// Dense window of the operator matrix on span(e_1..e_N). Entries whose row or
// column index exceeds N are excluded outright; only fixed-cell series are cut
// by the block budget, and their discarded mass is certified in tail_bound.
struct TruncationResult {
  i64 dimension = 0;
  i64 entries_used = 0;
  std::vector<double> matrix;  // row-major, dimension x dimension
  std::optional<Rat> tail_bound;

  double at(i64 row, i64 col) const;  // 1-based
};

// Consumes blocks t <= block_budget. Every entry with both indices inside the
// window must lie within the budget except fixed-cell series (BudgetTooSmall
// otherwise). Entries are accumulated exactly and rounded once at the end;
// cell series without a closed exact form use a certified 320-bit enclosure.
TruncationResult truncate_matrix(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                                 const BlockSequenceSpec& psi, i64 N, i64 block_budget);

// Extremal eigenvalues (A_N, B_N) of the truncated frame operator of phi on
// span(e_1..e_N), by power iteration and inverse iteration to relative
// tolerance 1e-10 (NoConvergence with residual after 1e5 steps).
std::pair<double, double> frame_bounds_numeric(const BlockSequenceSpec& phi, i64 N);

// extremal singular values of an already-built truncation window
std::pair<double, double> singular_range(const TruncationResult& tr);

struct DeviationReport {
  double deviation = 0.0;  // certified upper bound on max |entry - delta|
  Rat bound;               // analytical tail bound for the same window
  bool pass = false;       // deviation <= bound, compared in exact arithmetic
};

// Distance of the truncated matrix from the identity; the comparison against
// the tail bound is exact, so finite constructions report deviation 0.
// ValueUnknown when some contributing series has no certified tail.
DeviationReport identity_deviation(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                                   const BlockSequenceSpec& psi, i64 N, i64 block_budget);

enum class StressStrategy { PositiveOnly, AlternatingWorst };

// Norm of the sub-series keeping only positive (or absolute) contributions per
// basis coordinate over blocks t <= blocks, with <f, e_j> = f(j). Growth in
// `blocks` witnesses that the full series cannot converge unconditionally.
double rearrangement_stress(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                            const BlockSequenceSpec& psi, const TermExpr& f,
                            StressStrategy strategy, i64 blocks);

// row-major CSV, 17 significant digits per entry
void export_matrix_csv(const TruncationResult& tr, const std::string& path);

}  // namespace framemul
