#include <gtest/gtest.h>

#include <random>

#include "gc2gnn/compile.hpp"
#include "gc2gnn/parser.hpp"
#include "gc2gnn/refine.hpp"
#include "support/generators.hpp"

using namespace gc2gnn;

TEST(ColorRefine, SmallTree) {
  const auto tr = color_refine(gen_tree({1, 2}));
  ASSERT_TRUE(tr.stable_round);
  EXPECT_EQ(*tr.stable_round, 2u);
  EXPECT_EQ(tr.class_count(0), 1u);
  EXPECT_EQ(tr.class_count(1), 3u);
  EXPECT_EQ(tr.class_count(2), 5u);
  // Leaves under the same child stay together; leaf 3 sees a parent of smaller degree.
  EXPECT_EQ(tr.rounds.back()[4], tr.rounds.back()[5]);
  EXPECT_NE(tr.rounds.back()[3], tr.rounds.back()[4]);
}

TEST(ColorRefine, StableImmediatelyOnRegularGraphs) {
  // 4-cycle: every vertex looks the same.
  const auto tr = color_refine(make_graph(1, {1, 1, 1, 1}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  EXPECT_EQ(*tr.stable_round, 0u);
  const auto single = color_refine(make_graph(1, {1}, {}));
  EXPECT_EQ(*single.stable_round, 0u);
}

TEST(ColorRefine, FixedRoundCount) {
  const auto tr = color_refine(gen_tree({1, 2}), 5);
  EXPECT_EQ(tr.rounds.size(), 6u);
  EXPECT_EQ(*tr.stable_round, 2u);
  EXPECT_EQ(tr.rounds[5], tr.rounds[2]);
  EXPECT_FALSE(color_refine(gen_tree({1, 2}), 1).stable_round);
}

TEST(ColorRefine, PartitionsOnlyGetFiner) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const LabeledGraph g = gen::random_graph(rng, 14, 2);
    const auto tr = color_refine(g, 6);
    for (size_t t = 0; t + 1 < tr.rounds.size(); ++t) {
      std::map<Vertex, ClassId> fine, coarse;
      for (Vertex v = 0; v < g.size(); ++v) fine[v] = tr.rounds[t + 1][v], coarse[v] = tr.rounds[t][v];
      EXPECT_TRUE(check_refines(fine, coarse).ok);
    }
  }
}

TEST(ColorRefine, InvariantUnderRelabeling) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const LabeledGraph g = gen::random_graph(rng, 10, 2);
    std::vector<Vertex> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto a = color_refine(g, 4), b = color_refine(relabel(g, perm), 4);
    for (size_t t = 0; t <= 4; ++t) EXPECT_EQ(a.class_count(t), b.class_count(t));
  }
}

TEST(CheckRefines, ReportsWitness) {
  std::map<int, int> fine{{1, 0}, {2, 0}, {3, 1}};
  std::map<int, std::string> coarse{{1, "a"}, {2, "b"}, {3, "b"}};
  const auto r = check_refines(fine, coarse);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.witness, std::make_pair(1, 2));
  EXPECT_TRUE(check_refines(coarse, std::map<int, int>{{1, 0}, {2, 0}, {3, 0}}).ok);
  EXPECT_THROW(check_refines(fine, std::map<int, int>{{1, 0}}), std::invalid_argument);
}

TEST(CheckRefines, RefinementBoundsCompiledEmbeddings) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 60; ++i) {
    const Formula f = desugar(gen::random_gc2(rng, 4, 2));
    const GnnModel m = compile_gc2_relu(f, 2);
    const LabeledGraph g =
        disjoint_union(gen::random_graph(rng, 10, 2), gen::random_graph(rng, 10, 2));
    const auto tr = color_refine(g, 4);
    const auto trace = run<Rat>(m, g, 1, 4);
    for (size_t t = 0; t <= 4; ++t) {
      std::map<Vertex, ClassId> fine;
      std::map<Vertex, std::vector<Rat>> coarse;
      for (Vertex v = 0; v < g.size(); ++v) fine[v] = tr.rounds[t][v], coarse[v] = trace[t][v];
      EXPECT_TRUE(check_refines(fine, coarse).ok);
    }
  }
}

TEST(RefinementTrace, Csv) {
  const std::string csv = trace_to_csv(color_refine(make_graph(1, {1, 1}, {{0, 1}})));
  EXPECT_EQ(csv, "round,vertex,class\n0,0,0\n0,1,0\n1,0,0\n1,1,0\n");
}
