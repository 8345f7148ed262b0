#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace framemul {

using Rat = mpq_class;
using Int = mpz_class;
using i64 = std::int64_t;

class Error : public std::runtime_error {
 public:
  enum Code {
    ZeroBase,
    NegativeCoeff,
    DivisionByZero,
    PrecisionCapExceeded,
    NotClosed,
    HeterogeneousRadicals,
    SyntaxError,
    ZeroWeight,
    NegativeRepeat,
    ShapeMismatch,
    ValueUnknown,
    BudgetTooSmall,
    NoConvergence,
    InvalidWitness,
    IoError,
    SelfConsistency,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

inline int sgn_rat(const Rat& q) { return sgn(q); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline i64 to_i64(const Rat& q) {
  if (!is_integer(q)) throw Error(Error::SyntaxError, "expected integer value");
  return static_cast<i64>(q.get_num().get_si());
}

// q^e for integer e (q != 0 when e < 0).
Rat rat_pow(const Rat& q, i64 e);

// prime factorization by trial division; n >= 2
std::vector<std::pair<i64, i64>> factorize(i64 n);

// floor(q) as an integer
Int rat_floor(const Rat& q);
// truncation toward zero
Int rat_trunc(const Rat& q);

std::string rat_str(const Rat& q);

}  // namespace framemul
