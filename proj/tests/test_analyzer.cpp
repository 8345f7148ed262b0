#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "framemul/analyzer.hpp"

using namespace framemul;

namespace {

BlockSequenceSpec sp(const std::string& text) { return parse_sequence_spec(text); }

const std::string onb = "seq onb block { repeat 1: [(w=1, idx=t)] }";
const std::string ones = "seq one block { repeat 1: [(w=1)] }";

}  // namespace

TEST_CASE("bounded basis multiplier converges unconditionally") {
  UcResult r = decide_unconditional(sp(ones), sp(onb), sp(onb));
  CHECK(r.verdict == UcVerdict::Yes);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::BesselBesselBounded);
}

TEST_CASE("growing weights against a basis are not well defined") {
  UcResult r = decide_unconditional(sp("seq m block { repeat 1: [(w=t)] }"), sp(onb), sp(onb));
  CHECK(r.verdict == UcVerdict::NotWellDefined);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NotWellDefined_Riesz);

  AnalysisResult a = analyze(sp("seq m block { repeat 1: [(w=t)] }"), sp(onb), sp(onb));
  CHECK(a.uc.verdict == UcVerdict::NotWellDefined);
  CHECK(a.inv.skipped);
  CHECK(a.inv.verdict == InvVerdict::Unknown);
}

TEST_CASE("norm-bounded-below sequence with non-Bessel folding fails") {
  std::string over = "seq p prelude [(1, 1)] block { repeat 1: [(w=1, idx=t)] }";
  std::string m = "seq m prelude [(1)] block { repeat 1: [(w=t)] }";
  UcResult r = decide_unconditional(sp(m), sp(over), sp(over));
  CHECK(r.verdict == UcVerdict::No);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NotUC_NBB_NotBessel);
}

TEST_CASE("anchor row with square-summable entries is certified by shape") {
  std::string phi = "seq p block { repeat 1: [(w=t, idx=1)] }";
  std::string psi = "seq q block { repeat 1: [(w=t^(-3), idx=t)] }";
  UcResult r = decide_unconditional(sp(ones), sp(phi), sp(psi));
  CHECK(r.verdict == UcVerdict::Yes);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::PatternBounded);
  bool mentions_row = false;
  for (const auto& p : r.cert->premises)
    if (p.find("row 1") != std::string::npos) mentions_row = true;
  CHECK(mentions_row);
}

TEST_CASE("rescaling witness turns growing weights into a certified yes") {
  BlockSequenceSpec m = sp("seq m block { repeat 1: [(w=t^(-2))] }");
  BlockSequenceSpec phi = sp("seq phi block { repeat 1: [(w=t, idx=t)] }");
  RescalingWitness w;
  w.nu = sp("seq nu block { repeat 1: [(w=1)] }");
  w.c = sp("seq c block { repeat 1: [(w=1/t)] }");
  w.d = sp("seq d block { repeat 1: [(w=1/t)] }");
  w.xi = sp("seq xi block { repeat 1: [(w=1, idx=t)] }");
  w.theta = sp("seq theta block { repeat 1: [(w=1, idx=t)] }");
  CHECK(check_rescaling_witness(m, phi, phi, w));

  UcResult r = decide_unconditional(m, phi, phi, &w);
  CHECK(r.verdict == UcVerdict::Yes);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::RescalingWitness);

  RescalingWitness bad = w;
  bad.xi = sp("seq xi block { repeat 1: [(w=2, idx=t)] }");
  CHECK_FALSE(check_rescaling_witness(m, phi, phi, bad));
  CHECK_THROWS_AS(decide_unconditional(m, phi, phi, &bad), Error);
}

TEST_CASE("identity is recognized before anything else") {
  InvResult r = decide_invertibility(sp(ones), sp(onb), sp(onb));
  CHECK(r.verdict == InvVerdict::Invertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::Inv_Identity);
}

TEST_CASE("semi-normalized diagonal certifies invertibility") {
  InvResult r =
      decide_invertibility(sp("seq m block { repeat 1: [(w=(t+1)/t)] }"), sp(onb), sp(onb));
  CHECK(r.verdict == InvVerdict::Invertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::Inv_DiagonalSN);
}

TEST_CASE("vanishing diagonal yields a range gap") {
  InvResult r =
      decide_invertibility(sp("seq m block { repeat 1: [(w=1/t)] }"), sp(onb), sp(onb));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_RangeGap);
  CHECK(r.cert->witness.find("no preimage") != std::string::npos);
}

TEST_CASE("index swap between two bases stays invertible") {
  std::string phi = "seq p block { repeat 1: [(w=1, idx=2*t), (w=1, idx=2*t-1)] }";
  std::string psi = "seq q block { repeat 1: [(w=1, idx=2*t-1), (w=1, idx=2*t)] }";
  std::string m = "seq m block { repeat 1: [(w=1), (w=1)] }";
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::Invertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::Inv_TwoRieszSN);
}

TEST_CASE("missing column index kills injectivity") {
  InvResult r =
      decide_invertibility(sp(ones), sp(onb), sp("seq q block { repeat 1: [(w=1, idx=t+1)] }"));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_NotInjective);
  CHECK(r.cert->witness.find("basis vector 1") != std::string::npos);
}

TEST_CASE("two equal columns kill injectivity") {
  std::string phi = "seq p prelude [(1, 1)] block { repeat 1: [(w=1, idx=t)] }";
  std::string psi = "seq q prelude [(1, 1)] block { repeat 1: [(w=1, idx=t+1)] }";
  std::string m = "seq m prelude [(1)] block { repeat 1: [(w=1)] }";
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_NotInjective);
  CHECK(r.cert->premises.front().find("columns 1 and 2") != std::string::npos);
}

TEST_CASE("bounded symbol cannot rescue a non-frame") {
  std::string phi = "seq p block { repeat 1: [(w=1/t, idx=t), (w=(1/2)^t, idx=1)] }";
  std::string psi = "seq q block { repeat 1: [(w=1, idx=t), (w=(1/2)^t, idx=2)] }";
  std::string m = "seq m block { repeat 1: [(w=1), (w=1)] }";
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_BesselNonFrame);
}

TEST_CASE("riesz against overcomplete blocks surjectivity") {
  std::string phi = "seq p prelude [(1, 1)] block { repeat 1: [(w=1, idx=t+1)] }";
  std::string psi = "seq q prelude [(1, 1)] block { repeat 1: [(w=1, idx=t)] }";
  std::string m = "seq m prelude [(1)] block { repeat 1: [(w=1)] }";
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_RieszVsOvercomplete);
  CHECK(r.cert->witness == "operator is injective but not surjective");

  // with equal weights the swapped pair already exhibits two equal columns
  InvResult s = decide_invertibility(sp(m), sp(psi), sp(phi));
  CHECK(s.verdict == InvVerdict::NotInvertible);
  REQUIRE(s.cert.has_value());
  CHECK(s.cert->rule == Rule::NonInv_NotInjective);

  // scaling the duplicated vector makes every column distinct
  std::string half = "seq h prelude [(1/2, 1)] block { repeat 1: [(w=1, idx=t)] }";
  InvResult t = decide_invertibility(sp(m), sp(half), sp(phi));
  CHECK(t.verdict == InvVerdict::NotInvertible);
  REQUIRE(t.cert.has_value());
  CHECK(t.cert->rule == Rule::NonInv_RieszVsOvercomplete);
  CHECK(t.cert->witness == "operator is surjective but not injective");
}

TEST_CASE("folded bessel non-frame pair blocks invertibility") {
  std::string phi = "seq p block { repeat 1: [(w=1, idx=2*t), (w=1, idx=2*t-1)] }";
  std::string psi = "seq q block { repeat 1: [(w=1, idx=2*t-1), (w=1, idx=2*t)] }";
  std::string m = "seq m block { repeat 1: [(w=1/t), (w=1/t)] }";
  UcResult u = decide_unconditional(sp(m), sp(phi), sp(psi));
  CHECK(u.verdict == UcVerdict::Yes);
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_BesselNonFrame);
}

TEST_CASE("riesz criterion rejects a non-riesz folded sequence") {
  std::string phi = "seq p block { repeat 1: [(w=1, idx=2*t), (w=1, idx=2*t-1)] }";
  std::string psi = "seq q block { repeat 1: [(w=1, idx=t), (w=1, idx=t)] }";
  std::string m = "seq m block { repeat 1: [(w=1), (w=t)] }";
  InvResult r = decide_invertibility(sp(m), sp(phi), sp(psi));
  CHECK(r.verdict == InvVerdict::NotInvertible);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->rule == Rule::NonInv_RieszCriterion);
}

TEST_CASE("reports are deterministic and carry the rule names") {
  AnalysisResult a = analyze(sp(ones), sp(onb), sp(onb));
  std::string s1 = analysis_json("demo", a);
  std::string s2 = analysis_json("demo", analyze(sp(ones), sp(onb), sp(onb)));
  CHECK(s1 == s2);
  CHECK(s1.find("\"case\": \"demo\"") != std::string::npos);
  CHECK(s1.find("Inv_Identity") != std::string::npos);
  CHECK(s1.find("BesselBesselBounded") != std::string::npos);

  AnalysisResult nwd = analyze(sp("seq m block { repeat 1: [(w=t)] }"), sp(onb), sp(onb));
  std::string s3 = analysis_json("nwd", nwd);
  CHECK(s3.find("not-applicable") != std::string::npos);
  CHECK(s3.find("not-well-defined") != std::string::npos);
}
