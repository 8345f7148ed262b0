#pragma once

#include <vector>

#include "framemul/classify.hpp"
#include "framemul/sequence_spec.hpp"
#include "framemul/series.hpp"

namespace framemul {

// One aligned (group, entry) slot of the operator sum: the signed product
// weight in the block parameter u >= 1, emitted count(u) times into the
// matrix cell (row(u), col(u)).
struct CellFamily {
  TermExpr term;
  Affine row;  // output basis index, from the left sequence
  Affine col;  // input basis index, from the right sequence
  Affine block{1, 0};  // originating block number, t = block.at(u)
};

// one prelude product, a single matrix entry
struct FixedCell {
  ExactScalar value;
  i64 row = 0;
  i64 col = 0;
};

// support shape of the entrywise-absolute matrix
enum class CellPattern { Diagonal, AnchorRow, AnchorColumn, AnchorRowAndColumn, Other };

// The operator f -> sum_n m_n <f, psi_n> phi_n collected per matrix cell.
// Cell (j, k) holds the sub-series of all aligned entries with output index j
// and input index k.
struct AggregateOperator {
  std::vector<FixedCell> fixed;
  std::vector<CellFamily> families;
  CellPattern pattern = CellPattern::Diagonal;
  i64 anchor_row = 0;  // engaged for AnchorRow / AnchorRowAndColumn
  i64 anchor_col = 0;  // engaged for AnchorColumn / AnchorRowAndColumn
};

// Requires the three specs to share prelude length, block start, and group
// shapes (repeat, phase, entry count); the symbol must be index-free and both
// sequences fully indexed. ShapeMismatch otherwise.
AggregateOperator build_aggregates(const BlockSequenceSpec& m,
                                   const BlockSequenceSpec& phi,
                                   const BlockSequenceSpec& psi);

// certified cell sums: exact value, outward bracket, or unbounded when the
// absolute sub-series diverges
Extremum cell_signed(const AggregateOperator& op, i64 row, i64 col);
Extremum cell_absolute(const AggregateOperator& op, i64 row, i64 col);

// diagonal restriction of the absolute matrix, plus sign facts used by the
// invertibility rules
struct DiagonalView {
  bool pure = false;          // no off-diagonal content anywhere
  bool uniform_sign = false;  // all diagonal contributions share one sign
  int sign = 0;               // that sign when uniform (0 for an empty diagonal)
  CoefficientProfile absolute;
};

DiagonalView diagonal_view(const AggregateOperator& op);

// Exact identity test: every off-diagonal contribution cancels syntactically,
// the diagonal hits every index, and every diagonal cell sums to exactly 1.
// ValueUnknown when a needed cell value has no closed form.
bool equals_identity(const AggregateOperator& op);

// exact test against the diagonal operator with entries k^(-power), k >= 1
bool equals_diagonal_power(const AggregateOperator& op, i64 power);

}  // namespace framemul
