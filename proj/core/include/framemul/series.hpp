#pragma once

#include <functional>
#include <set>
#include <vector>

#include "framemul/term_expr.hpp"

namespace framemul {

struct SeriesVerdict {
  enum class Status { ConvergesTo, Finite, Diverges };  // Finite = converges, value not closed-form
  Status status = Status::Diverges;
  ExactScalar value;             // ConvergesTo only
  std::function<Rat(i64)> tail;  // T -> dyadic upper bound on sum_{t>T} |term(t)|; null iff Diverges

  bool converges() const { return status != Status::Diverges; }
};

// series over t >= 1 of |term(t)| (count included)
SeriesVerdict classify_series(const TermExpr& e);

// exact sum_{t=1}^{T} term(t); HeterogeneousRadicals when terms span several
// radical monomials
ExactScalar partial_sum(const TermExpr& e, i64 T);
ScalarInterval partial_sum_interval(const TermExpr& e, i64 T, int precision_bits);

// extremum results; either exact, +infinity, or a dyadic bracket
struct Extremum {
  bool unbounded = false;
  bool exact = true;
  ExactScalar value;  // when exact && !unbounded
  Rat lo, hi;         // bracket when !exact

  double to_double() const;
};

// sup / inf of |term(t)| over t >= 1; count(t) must be identically 1
Extremum term_sup(const TermExpr& e);
Extremum term_inf(const TermExpr& e);

// Sum of closed-form families sharing the block parameter t; all entries must
// be nonnegative for the extremum routines (callers pass magnitudes).
using TermSum = std::vector<TermExpr>;

Extremum sum_sup(const TermSum& s, const std::set<i64>& exclude_t = {});
Extremum sum_inf(const TermSum& s, const std::set<i64>& exclude_t = {});

// exact evaluation of a term-sum at one t; nullopt when radical parts differ
std::optional<ExactScalar> sum_value_at(const TermSum& s, i64 t);
ScalarInterval sum_interval_at(const TermSum& s, i64 t, int precision_bits);

// pointwise max / min over a nonempty candidate list, staying exact whenever
// one exact candidate provably dominates
Extremum combine_max(const std::vector<Extremum>& xs);
Extremum combine_min(const std::vector<Extremum>& xs);

// certified value of sum_{t>=1} term(t); the term keeps one sign on its whole
// domain, so this is the signed series: exact, a bracket with certified tail,
// or unbounded when the absolute series diverges
Extremum series_value(const TermExpr& e);

// certified sum of finitely many certified values (any unbounded piece wins)
Extremum combine_sum(const std::vector<Extremum>& pieces);

// eventual monotonicity of |term(t)|: direction certified for all t >= threshold
enum class Direction { NonInc, NonDec, Flat };
struct MonotoneInfo {
  i64 threshold = 1;
  Direction dir = Direction::Flat;
};
MonotoneInfo monotone_threshold(const TermExpr& count_free_magnitude);

}  // namespace framemul
