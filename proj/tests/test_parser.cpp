#include <gtest/gtest.h>

#include <random>

#include "gc2gnn/parser.hpp"
#include "support/generators.hpp"

using namespace gc2gnn;

TEST(Parser, ParsesQ2) {
  const Formula f = parse("not exists>=1 not exists>=2 true");
  EXPECT_EQ(f, Formula::negate(Formula::exists_geq(1, Formula::negate(Formula::exists_geq(2, Formula::top())))));
}

TEST(Parser, ParsesConjunctionWithHop) {
  const Formula f = parse("(col(1) and exists>=1 col(2))");
  EXPECT_EQ(f, Formula::conj(Formula::color(1), Formula::exists_geq(1, Formula::color(2))));
}

TEST(Parser, AndBindsTighterThanOrAndChainsAssociateLeft) {
  const Formula a = Formula::color(1), b = Formula::color(2), c = Formula::color(3);
  EXPECT_EQ(parse("col(1) or col(2) and col(3)"), Formula::disj(a, Formula::conj(b, c)));
  EXPECT_EQ(parse("col(1) and col(2) and col(3)"), Formula::conj(Formula::conj(a, b), c));
  EXPECT_EQ(parse("not col(1) and col(2)"), Formula::conj(Formula::negate(a), b));
  EXPECT_EQ(parse("exists>=2 col(1) and col(2)"), Formula::conj(Formula::exists_geq(2, a), b));
}

TEST(Parser, SkipsWhitespaceAndComments) {
  EXPECT_EQ(parse("  # comment\n exists >= 3\tcol( 2 ) # trailing\n"), Formula::exists_geq(3, Formula::color(2)));
}

TEST(Parser, ReportsSpans) {
  try {
    parse("col(1) and");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span.start, 10u);
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
  }
  try {
    parse("col(1) xor col(2)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span.start, 7u);
    EXPECT_EQ(e.span.end, 10u);
  }
}

TEST(Parser, RejectsZeroIndices) {
  EXPECT_THROW(parse("col(0)"), ParseError);
  EXPECT_THROW(parse("exists>=0 col(1)"), ParseError);
  EXPECT_THROW(parse("notcol(1)"), ParseError);
  EXPECT_THROW(parse("(col(1)"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(Parser, RenderRoundTrips) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Formula f = gen::random_gc2(rng, 6, 4);
    const std::string text = render(f);
    EXPECT_EQ(parse(text), f) << text;
    EXPECT_EQ(render(parse(text)), text);
  }
}

TEST(Parser, RenderForms) {
  EXPECT_EQ(render(parse("not exists>=1 not exists>=2 true")), "not exists>=1 not exists>=2 true");
  EXPECT_EQ(render(parse("col(1) or col(2) and col(3)")), "(col(1) or (col(2) and col(3)))");
}
