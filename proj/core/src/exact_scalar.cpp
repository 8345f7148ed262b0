#include "framemul/exact_scalar.hpp"

#include <cctype>
#include <sstream>
#include <tuple>

namespace framemul {

Rat rat_pow(const Rat& q, i64 e) {
  if (e == 0) return Rat(1);
  if (q == 0) {
    if (e < 0) throw Error(Error::DivisionByZero, "0 to a negative power");
    return Rat(0);
  }
  Rat base = e < 0 ? Rat(1) / q : q;
  i64 n = e < 0 ? -e : e;
  Rat acc(1);
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

std::vector<std::pair<i64, i64>> factorize(i64 n) {
  if (n < 2) throw Error(Error::ZeroBase, "factorize: base must be >= 2");
  std::vector<std::pair<i64, i64>> out;
  for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      i64 e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Int rat_trunc(const Rat& q) {
  Int r;
  mpz_tdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

std::string rat_str(const Rat& q) { return q.get_str(); }

ExactScalar ExactScalar::from_int(i64 v) { return from_rat(Rat(static_cast<long>(v))); }

ExactScalar ExactScalar::from_rat(const Rat& q) {
  ExactScalar x;
  if (q == 0) return x;
  x.sign = sgn_rat(q);
  x.coeff = ::abs(q);
  x.coeff.canonicalize();
  return x;
}

Rat ExactScalar::rat_value() const {
  if (!is_rational()) throw Error(Error::NotClosed, "value has a radical part");
  return sign == 0 ? Rat(0) : Rat(sign) * coeff;
}

// p-adic valuation of a positive rational, removing the p-part in place.
static i64 extract_valuation(Rat& q, i64 p) {
  Int num = q.get_num(), den = q.get_den();
  i64 v = 0;
  while (mpz_divisible_ui_p(num.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(p));
    --v;
  }
  q = Rat(num) / Rat(den);
  q.canonicalize();
  return v;
}

ExactScalar make_canonical(int sign, Rat coeff_abs, std::map<i64, Rat> prime_exp) {
  if (sign == 0 || coeff_abs == 0) return ExactScalar::zero();
  coeff_abs.canonicalize();
  ExactScalar x;
  x.sign = sign > 0 ? 1 : -1;
  for (auto& [p, e] : prime_exp) {
    if (e == 0) continue;
    if (is_integer(e)) {
      coeff_abs *= rat_pow(Rat(static_cast<long>(p)), to_i64(e));
      continue;
    }
    i64 val = extract_valuation(coeff_abs, p);
    Rat v = e + Rat(static_cast<long>(val));
    if (is_integer(v)) {
      coeff_abs *= rat_pow(Rat(static_cast<long>(p)), to_i64(v));
      continue;
    }
    Rat z(rat_trunc(v));
    coeff_abs *= rat_pow(Rat(static_cast<long>(p)), to_i64(z));
    Rat f = v - z;
    f.canonicalize();
    x.radical[p] = f;
  }
  coeff_abs.canonicalize();
  x.coeff = coeff_abs;
  return x;
}

ExactScalar normalize(int sign, const Rat& coeff,
                      const std::vector<std::pair<i64, Rat>>& base_exponent_pairs) {
  if (coeff < 0) throw Error(Error::NegativeCoeff, "normalize: coeff must be >= 0");
  std::map<i64, Rat> exps;
  for (const auto& [base, e] : base_exponent_pairs) {
    if (base < 2) throw Error(Error::ZeroBase, "normalize: bases must be integers >= 2");
    for (const auto& [p, a] : factorize(base)) {
      exps[p] += Rat(static_cast<long>(a)) * e;
    }
  }
  return make_canonical(sign, coeff, std::move(exps));
}

std::tuple<int, Rat, std::vector<std::pair<i64, Rat>>> decompose(const ExactScalar& x) {
  std::vector<std::pair<i64, Rat>> rad(x.radical.begin(), x.radical.end());
  return {x.sign, x.coeff, rad};
}

ExactScalar mul(const ExactScalar& a, const ExactScalar& b) {
  if (a.is_zero() || b.is_zero()) return ExactScalar::zero();
  std::map<i64, Rat> exps = a.radical;
  for (const auto& [p, e] : b.radical) exps[p] += e;
  return make_canonical(a.sign * b.sign, a.coeff * b.coeff, std::move(exps));
}

ExactScalar inv(const ExactScalar& a) {
  if (a.is_zero()) throw Error(Error::DivisionByZero, "inv(0)");
  std::map<i64, Rat> exps;
  for (const auto& [p, e] : a.radical) exps[p] = -e;
  return make_canonical(a.sign, Rat(1) / a.coeff, std::move(exps));
}

ExactScalar div(const ExactScalar& a, const ExactScalar& b) { return mul(a, inv(b)); }

ExactScalar neg(const ExactScalar& a) {
  ExactScalar x = a;
  x.sign = -x.sign;
  return x;
}

ExactScalar abs(const ExactScalar& a) {
  ExactScalar x = a;
  if (x.sign < 0) x.sign = 1;
  return x;
}

std::optional<ExactScalar> add(const ExactScalar& a, const ExactScalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.radical != b.radical) return std::nullopt;
  Rat s = Rat(a.sign) * a.coeff + Rat(b.sign) * b.coeff;
  if (s == 0) return ExactScalar::zero();
  return make_canonical(sgn_rat(s), ::abs(s), a.radical);
}

std::optional<ExactScalar> sum_all(const std::vector<ExactScalar>& parts) {
  std::map<std::map<i64, Rat>, Rat> buckets;
  for (const auto& p : parts) {
    if (p.is_zero()) continue;
    buckets[p.radical] += Rat(Rat(p.sign) * p.coeff);
  }
  ExactScalar out = ExactScalar::zero();
  bool found = false;
  for (const auto& [rad, q] : buckets) {
    if (q == 0) continue;
    if (found) return std::nullopt;
    out = make_canonical(sgn_rat(q), ::abs(q), rad);
    found = true;
  }
  return out;
}

ExactScalar pow_int(const ExactScalar& a, i64 e) {
  if (e == 0) return ExactScalar::one();
  if (a.is_zero()) {
    if (e < 0) throw Error(Error::DivisionByZero, "0 to a negative power");
    return ExactScalar::zero();
  }
  int sign = (a.sign < 0 && (e & 1)) ? -1 : 1;
  std::map<i64, Rat> exps;
  for (const auto& [p, f] : a.radical) exps[p] = f * Rat(static_cast<long>(e));
  return make_canonical(sign, rat_pow(a.coeff, e), std::move(exps));
}

ExactScalar pow_rat(const Rat& base, const Rat& e) {
  if (base <= 0) throw Error(Error::ZeroBase, "pow_rat: base must be > 0");
  if (is_integer(e)) return ExactScalar::from_rat(rat_pow(base, to_i64(e)));
  std::map<i64, Rat> exps;
  Int num = base.get_num(), den = base.get_den();
  if (!num.fits_slong_p() || !den.fits_slong_p())
    throw Error(Error::ZeroBase, "pow_rat: base too large to factor");
  if (num != 1)
    for (const auto& [p, a] : factorize(num.get_si())) exps[p] += Rat(static_cast<long>(a)) * e;
  if (den != 1)
    for (const auto& [p, a] : factorize(den.get_si())) exps[p] -= Rat(static_cast<long>(a)) * e;
  return make_canonical(1, Rat(1), std::move(exps));
}

std::string ExactScalar::str() const {
  if (sign == 0) return "0";
  std::ostringstream os;
  if (sign < 0) os << "-";
  os << coeff.get_str();
  for (const auto& [p, e] : radical) {
    os << "*" << p << "^(" << e.get_str() << ")";
  }
  return os.str();
}

namespace {

struct Lexer {
  std::string_view s;
  size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool peek(char c) {
    skip_ws();
    return i < s.size() && s[i] == c;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  i64 integer() {
    skip_ws();
    bool negv = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      negv = s[i] == '-';
      ++i;
    }
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
      throw Error(Error::SyntaxError, "scalar literal: expected integer at offset " +
                                          std::to_string(i) + " in '" + std::string(s) + "'");
    i64 v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      v = v * 10 + (s[i] - '0');
      ++i;
    }
    return negv ? -v : v;
  }
  Rat fraction() {  // INT [/ INT]
    i64 n = integer();
    if (eat('/')) {
      i64 d = integer();
      if (d == 0) throw Error(Error::SyntaxError, "scalar literal: zero denominator");
      Rat q(static_cast<long>(n), static_cast<long>(d));
      q.canonicalize();
      return q;
    }
    return Rat(static_cast<long>(n));
  }
};

}  // namespace

ExactScalar parse_scalar(std::string_view text) {
  Lexer lx{text};
  lx.skip_ws();
  bool negv = false;
  if (lx.peek('-')) {
    negv = true;
    lx.eat('-');
  }
  // leading rational; a bare `INT^(..)` radical factor is also accepted
  Rat coeff(1);
  std::vector<std::pair<i64, Rat>> factors;
  i64 first = lx.integer();
  if (lx.peek('^')) {
    lx.eat('^');
    if (!lx.eat('(')) throw Error(Error::SyntaxError, "scalar literal: expected ( after ^");
    Rat e = lx.fraction();
    if (!lx.eat(')')) throw Error(Error::SyntaxError, "scalar literal: expected )");
    if (first < 2) throw Error(Error::ZeroBase, "scalar literal: radical base must be >= 2");
    factors.emplace_back(first, e);
  } else {
    if (lx.eat('/')) {
      i64 d = lx.integer();
      if (d == 0) throw Error(Error::SyntaxError, "scalar literal: zero denominator");
      coeff = Rat(static_cast<long>(first), static_cast<long>(d));
      coeff.canonicalize();
    } else {
      coeff = Rat(static_cast<long>(first));
    }
  }
  while (lx.eat('*')) {
    i64 base = lx.integer();
    if (!lx.eat('^'))
      throw Error(Error::SyntaxError, "scalar literal: expected ^ in radical factor");
    if (!lx.eat('(')) throw Error(Error::SyntaxError, "scalar literal: expected ( after ^");
    Rat e = lx.fraction();
    if (!lx.eat(')')) throw Error(Error::SyntaxError, "scalar literal: expected )");
    if (base < 2) throw Error(Error::ZeroBase, "scalar literal: radical base must be >= 2");
    factors.emplace_back(base, e);
  }
  if (!lx.done())
    throw Error(Error::SyntaxError,
                "scalar literal: trailing input in '" + std::string(text) + "'");
  int sign;
  if (coeff < 0) {
    sign = negv ? 1 : -1;
    coeff = -coeff;
  } else if (coeff == 0) {
    sign = 0;
  } else {
    sign = negv ? -1 : 1;
  }
  return normalize(sign, coeff, factors);
}

}  // namespace framemul
