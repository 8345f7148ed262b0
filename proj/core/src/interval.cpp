#include <mpfr.h>

#include "framemul/exact_scalar.hpp"

namespace framemul {

namespace {

constexpr int kPrecisionCap = 4096;
constexpr int kGuardBits = 8;

class Mpfr {
 public:
  explicit Mpfr(int bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

Rat mpfr_to_rat(mpfr_ptr x) {
  if (mpfr_zero_p(x)) return Rat(0);
  Int z;
  mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), x);
  Rat r(z);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  r.canonicalize();
  return r;
}

// magnitude coeff * prod p^f with directed rounding; all factors positive
void eval_magnitude(const ExactScalar& x, int bits, mpfr_rnd_t rnd, mpfr_ptr out) {
  mpfr_set_q(out, x.coeff.get_mpq_t(), rnd);
  Mpfr base(bits), expo(bits), term(bits);
  for (const auto& [p, f] : x.radical) {
    mpfr_set_si(base.get(), static_cast<long>(p), MPFR_RNDN);  // exact for small p
    // p > 1, so p^f is increasing in f: round the exponent the same way.
    mpfr_set_q(expo.get(), f.get_mpq_t(), rnd);
    mpfr_pow(term.get(), base.get(), expo.get(), rnd);
    mpfr_mul(out, out, term.get(), rnd);
  }
}

}  // namespace

ScalarInterval eval_interval(const ExactScalar& x, int precision_bits) {
  ScalarInterval iv;
  iv.precision_bits = precision_bits;
  if (x.is_zero()) {
    iv.lo = iv.hi = Rat(0);
    return iv;
  }
  int work = precision_bits + kGuardBits;
  Mpfr lo(work), hi(work);
  eval_magnitude(x, work, MPFR_RNDD, lo.get());
  eval_magnitude(x, work, MPFR_RNDU, hi.get());
  Rat rlo = mpfr_to_rat(lo.get());
  Rat rhi = mpfr_to_rat(hi.get());
  if (x.sign < 0) {
    iv.lo = -rhi;
    iv.hi = -rlo;
  } else {
    iv.lo = rlo;
    iv.hi = rhi;
  }
  return iv;
}

double ExactScalar::to_double() const {
  if (is_zero()) return 0.0;
  Mpfr acc(64);
  eval_magnitude(*this, 64, MPFR_RNDN, acc.get());
  double m = mpfr_get_d(acc.get(), MPFR_RNDN);
  return sign < 0 ? -m : m;
}

Cmp compare(const ExactScalar& a, const ExactScalar& b) {
  if (a == b) return Cmp::Equal;
  if (a.sign != b.sign) return a.sign < b.sign ? Cmp::Less : Cmp::Greater;
  if (a.is_rational() && b.is_rational()) {
    Rat va = a.rat_value(), vb = b.rat_value();
    return va < vb ? Cmp::Less : Cmp::Greater;
  }
  for (int bits = 53; bits <= kPrecisionCap; bits *= 2) {
    ScalarInterval ia = eval_interval(a, bits);
    ScalarInterval ib = eval_interval(b, bits);
    if (ia.hi < ib.lo) return Cmp::Less;
    if (ib.hi < ia.lo) return Cmp::Greater;
  }
  throw Error(Error::PrecisionCapExceeded,
              "compare: values not separated at 4096 bits: " + a.str() + " vs " + b.str());
}

}  // namespace framemul
