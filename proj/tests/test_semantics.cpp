#include <gtest/gtest.h>

#include <random>

#include "gc2gnn/parser.hpp"
#include "gc2gnn/semantics.hpp"
#include "support/generators.hpp"

using namespace gc2gnn;

namespace {

// Direct recursive reading of the satisfaction relation.
bool holds(const Formula& f, const LabeledGraph& g, Vertex v) {
  switch (f.kind()) {
    case NodeKind::Color: return g.color[v] == f.value();
    case NodeKind::Top: return true;
    case NodeKind::Not: return !holds(f.child(), g, v);
    case NodeKind::And: return holds(f.left(), g, v) && holds(f.right(), g, v);
    case NodeKind::Or: return holds(f.left(), g, v) || holds(f.right(), g, v);
    case NodeKind::ExistsGeq: {
      uint32_t n = 0;
      for (Vertex w : g.neighbors(v)) n += holds(f.child(), g, w);
      return n >= f.value();
    }
  }
  return false;
}

}  // namespace

TEST(Semantics, Q2OnSmallTrees) {
  const Formula q2 = parse("not exists>=1 not exists>=2 true");
  EXPECT_TRUE(eval(q2, gen_tree({1, 2}), 0));
  EXPECT_FALSE(eval(q2, gen_tree({0, 2}), 0));
  EXPECT_TRUE(eval(q2, gen_tree({3}), 0));
  EXPECT_FALSE(eval(q2, gen_tree({5, 5, 0}), 0));
}

TEST(Semantics, Q2OnTreesMatchesLeafCounts) {
  const Formula q2 = parse("not exists>=1 not exists>=2 true");
  for (uint32_t a = 0; a <= 3; ++a)
    for (uint32_t b = 0; b <= 3; ++b)
      for (uint32_t c = 0; c <= 3; ++c) EXPECT_EQ(eval(q2, gen_tree({a, b, c}), 0), a > 0 && b > 0 && c > 0);
}

TEST(Semantics, ConjunctionWithHop) {
  const Formula f = parse("(col(1) and exists>=1 col(2))");
  const LabeledGraph g = make_graph(2, {1, 2, 1, 1}, {{0, 1}, {2, 3}});
  const SatVector sat = eval_all(f, g);
  EXPECT_EQ(sat, (SatVector{true, false, false, false}));
}

TEST(Semantics, AgreesWithRecursiveReading) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 400; ++i) {
    const Formula f = gen::random_gc2(rng, 5, 3);
    const LabeledGraph g = gen::random_graph(rng, 10, 3);
    const SatVector sat = eval_all(f, g);
    for (Vertex v = 0; v < g.size(); ++v) ASSERT_EQ(sat[v], holds(f, g, v)) << render(f);
    EXPECT_EQ(eval_all(desugar(f), g), sat);
  }
}

TEST(Semantics, RejectsOutOfRangeInputs) {
  const LabeledGraph g = make_graph(1, {1, 1}, {{0, 1}});
  EXPECT_THROW(eval_all(parse("col(2)"), g), std::out_of_range);
  EXPECT_THROW(eval(parse("col(1)"), g, 7), std::out_of_range);
}
