#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "framemul/numeric.hpp"

using namespace framemul;

namespace {

BlockSequenceSpec sp(const std::string& text) { return parse_sequence_spec(text); }

const std::string onb = "seq onb block { repeat 1: [(w=1, idx=t)] }";
const std::string ones = "seq one block { repeat 1: [(w=1)] }";

}  // namespace

TEST_CASE("basis truncation is the exact identity window") {
  TruncationResult tr = truncate_matrix(sp(ones), sp(onb), sp(onb), 3, 100);
  CHECK(tr.dimension == 3);
  CHECK(tr.entries_used == 3);
  for (i64 r = 1; r <= 3; ++r)
    for (i64 c = 1; c <= 3; ++c) CHECK(tr.at(r, c) == (r == c ? 1.0 : 0.0));
  REQUIRE(tr.tail_bound.has_value());
  CHECK(*tr.tail_bound == 0);
}

TEST_CASE("reciprocal symbol lands exactly on the sampled diagonal") {
  TruncationResult tr =
      truncate_matrix(sp("seq m block { repeat 1: [(w=1/t)] }"), sp(onb), sp(onb), 3, 100);
  CHECK(tr.at(1, 1) == 1.0);
  CHECK(tr.at(2, 2) == 0.5);
  CHECK(tr.at(3, 3) == 1.0 / 3.0);
  CHECK(tr.at(1, 2) == 0.0);
}

TEST_CASE("window beyond the block budget is rejected") {
  CHECK_THROWS_AS(truncate_matrix(sp(ones), sp(onb), sp(onb), 10, 5), Error);
  CHECK_THROWS_AS(truncate_matrix(sp(ones), sp(onb), sp(onb), 4, 0), Error);
}

TEST_CASE("geometric fixed cell carries a certified tail") {
  std::string anchor = "seq a block { repeat 1: [(w=(1/2)^t, idx=1)] }";
  TruncationResult tr = truncate_matrix(sp(ones), sp(anchor), sp(anchor), 2, 30);
  // partial sum of (1/4)^u, u <= 30
  CHECK(tr.at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(tr.at(2, 2) == 0.0);
  REQUIRE(tr.tail_bound.has_value());
  CHECK(*tr.tail_bound > 0);
  CHECK(*tr.tail_bound < Rat(1, 1000000));
}

TEST_CASE("divergent fixed cell reports no tail and the raw partial") {
  std::string rep = "seq a block { repeat 1: [(w=1, idx=1)] }";
  TruncationResult tr = truncate_matrix(sp(ones), sp(rep), sp(rep), 1, 25);
  CHECK(tr.at(1, 1) == 25.0);
  CHECK(tr.entries_used == 25);
  CHECK_FALSE(tr.tail_bound.has_value());
}

TEST_CASE("growing signed blocks collapse to the exact identity") {
  std::string phi =
      "seq p block { repeat t: [(w=1, idx=t)] repeat t-1: [(w=1, idx=t)] }";
  std::string psi =
      "seq q block { repeat t: [(w=1, idx=t)] repeat t-1: [(w=-1, idx=t)] }";
  std::string m = "seq m block { repeat t: [(w=1)] repeat t-1: [(w=1)] }";
  TruncationResult tr = truncate_matrix(sp(m), sp(phi), sp(psi), 4, 100);
  for (i64 r = 1; r <= 4; ++r)
    for (i64 c = 1; c <= 4; ++c) CHECK(tr.at(r, c) == (r == c ? 1.0 : 0.0));
  CHECK(tr.entries_used == 16);

  DeviationReport rep = identity_deviation(sp(m), sp(phi), sp(psi), 4, 100);
  CHECK(rep.deviation == 0.0);
  CHECK(rep.bound == 0);
  CHECK(rep.pass);
}

TEST_CASE("swapping the sequences transposes the window") {
  std::string phi = "seq p prelude [(1/2, 1)] block { repeat 1: [(w=1, idx=t)] }";
  std::string psi = "seq q prelude [(1, 1)] block { repeat 1: [(w=1, idx=t+1)] }";
  std::string m = "seq m prelude [(1)] block { repeat 1: [(w=1)] }";
  TruncationResult a = truncate_matrix(sp(m), sp(phi), sp(psi), 6, 100);
  TruncationResult b = truncate_matrix(sp(m), sp(psi), sp(phi), 6, 100);
  for (i64 r = 1; r <= 6; ++r)
    for (i64 c = 1; c <= 6; ++c) CHECK(a.at(r, c) == b.at(c, r));
}

TEST_CASE("duplicated basis images show up as equal columns") {
  std::string phi = "seq p prelude [(1, 1)] block { repeat 1: [(w=1, idx=t)] }";
  std::string psi = "seq q prelude [(1, 1)] block { repeat 1: [(w=1, idx=t+1)] }";
  std::string m = "seq m prelude [(1)] block { repeat 1: [(w=1)] }";
  TruncationResult tr = truncate_matrix(sp(m), sp(phi), sp(psi), 3, 100);
  for (i64 r = 1; r <= 3; ++r) CHECK(tr.at(r, 1) == tr.at(r, 2));
  CHECK(tr.at(1, 1) == 1.0);
}

TEST_CASE("frame bounds of weighted bases match the exact profiles") {
  auto [a1, b1] = frame_bounds_numeric(sp(onb), 16);
  CHECK(a1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b1 == doctest::Approx(1.0).epsilon(1e-9));

  std::string over = "seq p prelude [(1, 1)] block { repeat 1: [(w=1, idx=t)] }";
  auto [a2, b2] = frame_bounds_numeric(sp(over), 16);
  CHECK(a2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b2 == doctest::Approx(2.0).epsilon(1e-9));

  std::string fading = "seq f block { repeat 1: [(w=1/t, idx=t)] }";
  auto [a3, b3] = frame_bounds_numeric(sp(fading), 16);
  CHECK(a3 == doctest::Approx(1.0 / 256.0).epsilon(1e-9));
  CHECK(b3 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("missing index zeroes the lower frame bound") {
  std::string shifted = "seq s block { repeat 1: [(w=1, idx=t+1)] }";
  auto [a, b] = frame_bounds_numeric(sp(shifted), 8);
  CHECK(a == 0.0);
  CHECK(b == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("smallest singular value of the sampled diagonal is the last sample") {
  TruncationResult tr =
      truncate_matrix(sp("seq m block { repeat 1: [(w=1/t)] }"), sp(onb), sp(onb), 50, 100);
  auto [lo, hi] = singular_range(tr);
  CHECK(lo == doctest::Approx(1.0 / 50.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("deviation check distinguishes cancelling from surviving anchors") {
  std::string phi =
      "seq p block { repeat 1: [(w=1, idx=t), (w=(1/2)^t, idx=1), (w=(1/2)^t, idx=1)] }";
  std::string psi_twin =
      "seq q block { repeat 1: [(w=1, idx=t), (w=(1/2)^t, idx=1), (w=-(1/2)^t, idx=1)] }";
  std::string psi_live =
      "seq q block { repeat 1: [(w=1, idx=t), (w=(1/2)^t, idx=1), (w=(1/2)^t, idx=1)] }";
  std::string m = "seq m block { repeat 1: [(w=1), (w=1), (w=1)] }";

  DeviationReport good = identity_deviation(sp(m), sp(phi), sp(psi_twin), 8, 64);
  CHECK(good.deviation == 0.0);
  CHECK(good.bound == 0);
  CHECK(good.pass);

  DeviationReport bad = identity_deviation(sp(m), sp(phi), sp(psi_live), 8, 64);
  CHECK(bad.deviation == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("positive-part sums grow like sqrt of the block count") {
  std::string phi =
      "seq p block { repeat t: [(w=1, idx=t)] repeat t-1: [(w=1, idx=t)] }";
  std::string psi =
      "seq q block { repeat t: [(w=1, idx=t)] repeat t-1: [(w=-1, idx=t)] }";
  std::string m = "seq m block { repeat t: [(w=1)] repeat t-1: [(w=1)] }";
  TermExpr f = parse_term("1/t");

  double n100 = rearrangement_stress(sp(m), sp(phi), sp(psi), f, StressStrategy::PositiveOnly, 100);
  double n400 = rearrangement_stress(sp(m), sp(phi), sp(psi), f, StressStrategy::PositiveOnly, 400);
  CHECK(n100 == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(n400 == doctest::Approx(20.0).epsilon(1e-12));

  double worst =
      rearrangement_stress(sp(m), sp(phi), sp(psi), f, StressStrategy::AlternatingWorst, 100);
  CHECK(worst > n100);

  double tame = rearrangement_stress(sp(ones), sp(onb), sp(onb), f, StressStrategy::PositiveOnly,
                                     1000);
  CHECK(tame < 1.3);  // stays below the l2 norm of f
}

TEST_CASE("csv export writes the window row by row") {
  TruncationResult tr =
      truncate_matrix(sp("seq m block { repeat 1: [(w=1/t)] }"), sp(onb), sp(onb), 2, 10);
  std::string path = "/tmp/framemul_test_matrix.csv";
  export_matrix_csv(tr, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1 == "1,0");
  CHECK(l2 == "0,0.5");
  std::remove(path.c_str());

  CHECK_THROWS_AS(export_matrix_csv(tr, "/nonexistent-dir/x.csv"), Error);
}
