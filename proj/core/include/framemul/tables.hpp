#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "framemul/analyzer.hpp"
#include "framemul/classify.hpp"

namespace framemul {

// Row/column class of a weighted-basis sequence inside the feasibility grid.
// Non-Bessel rows split by which norm bounds hold, Bessel rows by whether the
// norms are semi-normalized.
enum class RowClass {
  SnNonBessel,
  NbaNonNbbNonBessel,
  NbbNonNbaNonBessel,
  NonNbaNonNbbNonBessel,
  SnBesselNonFrame,
  NonNbbBesselNonFrame,
  SnFrameOvercomplete,
  NonNbbFrameOvercomplete,
  RieszBasis,
};

enum class Claim { Possible, Always, NotPossible };

// One (symbol column, invertibility side) slot of a grid row.
//   Possible     at least one corpus exhibit must land here and pass
//   Always       every probe must land on this side; exhibits confirm it
//   NotPossible  every probe must be blocked by a certificate from `accept`
struct SubCell {
  Claim claim = Claim::Possible;
  std::vector<std::string> case_refs;  // cited corpus exhibits
  std::vector<Rule> accept;            // admissible certificates when blocked
};

// cells[col][side]: col 0 = SN symbol, 1 = bounded non-SN, 2 = unbounded;
// side 0 = invertible, 1 = non-invertible
struct TableRow {
  int table = 0;
  int row = 0;
  RowClass phi = RowClass::SnNonBessel;
  RowClass psi = RowClass::SnNonBessel;
  std::array<std::array<SubCell, 2>, 3> cells;
};

// the full grid, ten tables, ordered by (table, row)
const std::vector<TableRow>& table_rows();

// class pairs are unordered within one table
const TableRow* find_row(int table, RowClass a, RowClass b);

std::string row_class_str(RowClass c);
std::optional<RowClass> row_class_from_str(const std::string& s);

std::string symbol_kind_str(SymbolKind k);
std::optional<SymbolKind> symbol_kind_from_str(const std::string& s);

std::string claim_str(Claim c);
std::optional<Claim> claim_from_str(const std::string& s);

// descriptor of a classified sequence; nullopt for class combinations the
// grid does not track (e.g. Bessel non-frame with incomplete NBB data)
std::optional<RowClass> row_class_of(const SequenceClass& c);

// "t07.r2.c3.noninv" style slot identifier
std::string cell_key(int table, int row, int col, int side);

}  // namespace framemul
