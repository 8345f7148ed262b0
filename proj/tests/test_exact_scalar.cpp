#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "framemul/exact_scalar.hpp"

using namespace framemul;

namespace {

ExactScalar inv_sqrt2() { return normalize(1, Rat(1), {{2, Rat(-1, 2)}}); }

double width_bound(const ScalarInterval& iv) {
  double m = std::max({std::abs(iv.lo.get_d()), std::abs(iv.hi.get_d()), 1.0});
  return std::ldexp(m, 1 - iv.precision_bits);
}

// uniform scalar built from small weight-like pieces
ExactScalar random_scalar(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(1, 9), den(1, 9), e_num(-3, 3), e_den(1, 3);
  std::uniform_int_distribution<int> base_pick(0, 3);
  static const i64 bases[] = {2, 3, 5, 6};
  std::vector<std::pair<i64, Rat>> pairs;
  int nb = base_pick(rng) % 3;
  for (int i = 0; i < nb; ++i) {
    Rat e(e_num(rng), e_den(rng));
    e.canonicalize();
    pairs.emplace_back(bases[base_pick(rng)], e);
  }
  Rat c(num(rng), den(rng));
  c.canonicalize();
  return normalize(1, c, pairs);
}

}  // namespace

TEST_CASE("canonical form splits integer part of the prime valuation") {
  ExactScalar a = normalize(1, Rat(1), {{2, Rat(-1, 2)}});
  CHECK(a.sign == 1);
  CHECK(a.coeff == Rat(1));
  REQUIRE(a.radical.size() == 1);
  CHECK(a.radical.at(2) == Rat(-1, 2));

  ExactScalar b = normalize(1, Rat(1), {{4, Rat(-1, 2)}});
  CHECK(b.sign == 1);
  CHECK(b.coeff == Rat(1, 2));
  CHECK(b.radical.empty());

  ExactScalar c = normalize(1, Rat(1), {{8, Rat(-1, 3)}, {2, Rat(1)}});
  CHECK(c.is_one());
}

TEST_CASE("zero and sign handling") {
  CHECK(ExactScalar::zero().is_zero());
  CHECK(normalize(0, Rat(7), {{2, Rat(1, 2)}}).is_zero());
  ExactScalar m = normalize(-1, Rat(3, 4), {});
  CHECK(m.sign == -1);
  CHECK(m.rat_value() == Rat(-3, 4));
  CHECK_THROWS_AS(normalize(1, Rat(-1), {}), Error);
  CHECK_THROWS_AS(normalize(1, Rat(1), {{1, Rat(1, 2)}}), Error);
  CHECK_THROWS_AS(normalize(1, Rat(1), {{0, Rat(1, 2)}}), Error);
}

TEST_CASE("multiplication merges radicals and recanonicalizes") {
  ExactScalar half = ExactScalar::from_rat(Rat(1, 2));
  ExactScalar p = mul(half, inv_sqrt2());
  CHECK(p.sign == 1);
  CHECK(p.coeff == Rat(1, 2));
  REQUIRE(p.radical.size() == 1);
  CHECK(p.radical.at(2) == Rat(-1, 2));

  // sqrt(2) * sqrt(2) = 2
  ExactScalar r2 = normalize(1, Rat(1), {{2, Rat(1, 2)}});
  CHECK(mul(r2, r2) == ExactScalar::from_int(2));

  CHECK(mul(ExactScalar::zero(), r2).is_zero());
  CHECK(mul(neg(r2), r2) == ExactScalar::from_int(-2));
}

TEST_CASE("inverse and division") {
  ExactScalar x = normalize(1, Rat(3, 5), {{2, Rat(1, 2)}, {3, Rat(-1, 3)}});
  CHECK(mul(x, inv(x)).is_one());
  CHECK(div(x, x).is_one());
  CHECK_THROWS_AS(inv(ExactScalar::zero()), Error);
  CHECK_THROWS_AS(div(x, ExactScalar::zero()), Error);
}

TEST_CASE("addition is exact on matching radical parts") {
  ExactScalar half = ExactScalar::from_rat(Rat(1, 2));
  auto s = add(half, half);
  REQUIRE(s.has_value());
  CHECK(s->is_one());

  auto t = add(inv_sqrt2(), inv_sqrt2());
  REQUIRE(t.has_value());
  CHECK(t->sign == 1);
  CHECK(t->coeff == Rat(1));
  REQUIRE(t->radical.size() == 1);
  CHECK(t->radical.at(2) == Rat(1, 2));

  CHECK(!add(ExactScalar::one(), inv_sqrt2()).has_value());

  auto z = add(inv_sqrt2(), neg(inv_sqrt2()));
  REQUIRE(z.has_value());
  CHECK(z->is_zero());

  auto w = add(ExactScalar::zero(), inv_sqrt2());
  REQUIRE(w.has_value());
  CHECK(*w == inv_sqrt2());
}

TEST_CASE("integer and rational powers") {
  ExactScalar x = normalize(1, Rat(2, 3), {{2, Rat(1, 2)}});
  CHECK(pow_int(x, 0).is_one());
  CHECK(pow_int(x, 2) == normalize(1, Rat(8, 9), {}));
  CHECK(pow_int(x, -2) == normalize(1, Rat(9, 8), {}));
  CHECK(pow_rat(Rat(4), Rat(1, 2)) == ExactScalar::from_int(2));
  CHECK(pow_rat(Rat(1, 2), Rat(-1)) == ExactScalar::from_int(2));
  CHECK(pow_rat(Rat(2), Rat(-1, 2)) == inv_sqrt2());
}

TEST_CASE("comparison separates distinct values") {
  ExactScalar half = ExactScalar::from_rat(Rat(1, 2));
  CHECK(compare(inv_sqrt2(), half) == Cmp::Greater);
  ExactScalar q = normalize(1, Rat(1), {{2, Rat(-1, 4)}});
  CHECK(compare(q, inv_sqrt2()) == Cmp::Greater);
  CHECK(compare(q, q) == Cmp::Equal);
  CHECK(compare(neg(q), q) == Cmp::Less);
  CHECK(compare(ExactScalar::zero(), q) == Cmp::Less);
}

TEST_CASE("interval enclosure is tight and contains the value") {
  ExactScalar x = normalize(1, Rat(3, 7), {{2, Rat(1, 2)}, {5, Rat(-2, 3)}});
  double v = 3.0 / 7.0 * std::sqrt(2.0) * std::pow(5.0, -2.0 / 3.0);
  for (int bits : {53, 128, 512}) {
    ScalarInterval iv = eval_interval(x, bits);
    CHECK(iv.lo <= iv.hi);
    CHECK(iv.lo.get_d() <= v + 1e-12);
    CHECK(iv.hi.get_d() >= v - 1e-12);
    CHECK(Rat(iv.hi - iv.lo).get_d() <= width_bound(iv));
  }
  CHECK(x.to_double() == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("decompose then normalize is the identity") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 200; ++i) {
    ExactScalar x = random_scalar(rng);
    auto [s, c, pairs] = decompose(x);
    CHECK(normalize(s, c, pairs) == x);
  }
}

TEST_CASE("field laws hold on random scalars") {
  std::mt19937_64 rng(987654321);
  for (int i = 0; i < 200; ++i) {
    ExactScalar a = random_scalar(rng);
    ExactScalar b = random_scalar(rng);
    ExactScalar c = random_scalar(rng);
    CHECK(mul(a, b) == mul(b, a));
    CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
    CHECK(inv(mul(a, b)) == mul(inv(a), inv(b)));
    CHECK(mul(a, ExactScalar::one()) == a);
  }
}

TEST_CASE("comparison agrees with floating evaluation on random products") {
  std::mt19937_64 rng(1357911);
  for (int i = 0; i < 10000; ++i) {
    ExactScalar a = random_scalar(rng);
    ExactScalar b = random_scalar(rng);
    double da = a.to_double(), db = b.to_double();
    if (std::abs(da - db) <= 1e-9 * std::max(std::abs(da), std::abs(db))) continue;
    Cmp c = compare(a, b);
    CHECK(c == (da < db ? Cmp::Less : Cmp::Greater));
  }
}

TEST_CASE("exact sums agree with interval evaluation") {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 200; ++i) {
    ExactScalar a = random_scalar(rng);
    ExactScalar b = random_scalar(rng);
    auto s = add(a, b);
    if (!s) {
      CHECK(a.radical != b.radical);
      continue;
    }
    ScalarInterval ia = eval_interval(a, 128), ib = eval_interval(b, 128);
    ScalarInterval is = eval_interval(*s, 128);
    CHECK(is.lo <= ia.hi + ib.hi);
    CHECK(is.hi >= ia.lo + ib.lo);
  }
}

TEST_CASE("literal parsing round-trips canonical text") {
  CHECK(parse_scalar("1/2") == ExactScalar::from_rat(Rat(1, 2)));
  CHECK(parse_scalar("-1") == ExactScalar::from_int(-1));
  CHECK(parse_scalar("1*2^(-1/2)") == inv_sqrt2());
  CHECK(parse_scalar("1*2^(-1/4)") == normalize(1, Rat(1), {{2, Rat(-1, 4)}}));
  CHECK(parse_scalar("-3/4*2^(1/2)*3^(1/3)") ==
        normalize(-1, Rat(3, 4), {{2, Rat(1, 2)}, {3, Rat(1, 3)}}));
  CHECK(parse_scalar("0").is_zero());
  CHECK_THROWS_AS(parse_scalar("1/0"), Error);
  CHECK_THROWS_AS(parse_scalar("2^"), Error);
  CHECK_THROWS_AS(parse_scalar(""), Error);

  std::mt19937_64 rng(4242);
  for (int i = 0; i < 100; ++i) {
    ExactScalar x = random_scalar(rng);
    CHECK(parse_scalar(x.str()) == x);
  }
}
