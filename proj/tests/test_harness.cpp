#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gc2gnn/compile.hpp"
#include "gc2gnn/harness.hpp"
#include "support/generators.hpp"

using namespace gc2gnn;

namespace {

GnnModel fixture(const std::string& name) {
  std::ifstream in(std::string(GC2GNN_FIXTURES) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return load_model(os.str());
}

const Formula& q2() {
  static const Formula f = parse("not exists>=1 not exists>=2 true");
  return f;
}

GnnModel q2_relu() { return compile_gc2_relu(desugar(q2()), 1); }

// Unicolored recurrent model with a single activation and random small weights.
GnnModel random_model(std::mt19937_64& rng, size_t d, size_t T, const Activation& act) {
  GnnModel m;
  m.num_colors = 1;
  m.state_dim = d;
  m.iterations = T;
  m.init = Matrix<int>(d, 1, 0);
  for (size_t i = 0; i < d; ++i) m.init(i, 0) = static_cast<int>(rng() % 2);
  GnnLayer L = GnnLayer::zeros(d, act);
  std::uniform_int_distribution<long> w(-2, 2);
  for (size_t i = 0; i < d; ++i) {
    L.c[i] = Rat(w(rng));
    for (size_t j = 0; j < d; ++j) L.A(i, j) = Rat(w(rng)), L.B(i, j) = Rat(w(rng));
  }
  m.layers = {L};
  return m;
}

// Degree of the polynomial interpolating values at 0..n-1 (n > true degree).
long interpolated_degree(std::vector<Rat> v) {
  long deg = static_cast<long>(v.size()) - 1;
  // Finite differences: degree is the last order with a non-zero entry.
  long last_nonzero = -1;
  for (long order = 0; order <= deg; ++order) {
    if (std::any_of(v.begin(), v.end(), [](const Rat& x) { return !x.is_zero(); })) last_nonzero = order;
    for (size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
  return last_nonzero;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(DominantDirection, SumConstruction) {
  const auto w = dominant_direction({{2, 0}, {1, 1}}, {{0, 1}, {1, 1}});
  EXPECT_EQ(w.x_star, (IntVec{2, 0}));
  EXPECT_EQ(*w.y_star, (IntVec{1, 1}));
  EXPECT_EQ(w.u, (IntVec{3, 1}));
  EXPECT_EQ(w.construction, "sum");
  EXPECT_TRUE(verify_dominance(w).ok);
}

TEST(DominantDirection, FallsBackWhenSumIsNotDominant) {
  // With u = x* + y* = (2,5): <(0,1),u> = 5 > <(2,0),u> = 4.
  const std::vector<IntVec> S{{2, 0}, {0, 1}}, Sp{{0, 5}, {0, 1}};
  DirectionWitness naive{S, Sp, {2, 0}, IntVec{0, 5}, {2, 5}, "sum"};
  const auto check = verify_dominance(naive);
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.counterexample.find("(0,1)"), std::string::npos);

  const auto w = dominant_direction(S, Sp);
  EXPECT_EQ(w.construction, "lexicographic");
  EXPECT_EQ(w.u, (IntVec{42, 5}));
  EXPECT_TRUE(verify_dominance(w).ok) << verify_dominance(w).counterexample;
}

TEST(DominantDirection, EdgeCases) {
  EXPECT_THROW(dominant_direction({}), std::invalid_argument);
  EXPECT_THROW(dominant_direction({{0, 0}}), std::invalid_argument);
  EXPECT_THROW(dominant_direction({{1, 0}, {1}}), std::invalid_argument);
  EXPECT_THROW(dominant_direction({{1, -1}}), std::invalid_argument);
  const auto single = dominant_direction({{0, 3}});
  EXPECT_EQ(single.u, (IntVec{0, 3}));
  EXPECT_TRUE(verify_dominance(single).ok);
  const auto with_zero = dominant_direction({{1, 2}, {0, 0}}, {{0, 0}});
  EXPECT_TRUE(verify_dominance(with_zero).ok);
}

TEST(DominantDirection, RandomInstancesVerify) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const size_t p = 1 + rng() % 6;
    auto random_set = [&](bool allow_empty) {
      std::vector<IntVec> S;
      const size_t n = (allow_empty ? 0 : 1) + rng() % 6;
      for (size_t j = 0; j < n; ++j) {
        IntVec x(p);
        for (auto& e : x) e = static_cast<long>(rng() % 11);
        if (std::find(S.begin(), S.end(), x) == S.end()) S.push_back(x);
      }
      return S;
    };
    auto S = random_set(false);
    if (std::all_of(S.begin(), S.end(), [](const IntVec& x) { return dot(x, x) == 0; })) continue;
    const auto Sp = random_set(true);
    const auto w = dominant_direction(S, Sp);
    const auto check = verify_dominance(w);
    ASSERT_TRUE(check.ok) << check.counterexample;
  }
}

// ---------------------------------------------------------------------------

TEST(TreeEvaluator, MatchesFullRun) {
  std::mt19937_64 rng(4);
  std::vector<GnnModel> models{q2_relu(), fixture("rational_q2_unit.json"), fixture("poly_q2_candidate.json")};
  for (int i = 0; i < 10; ++i) models.push_back(random_model(rng, 1 + rng() % 3, 1 + rng() % 4, Activation::relu()));
  for (const auto& model : models) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<uint64_t> k(1 + rng() % 4);
      for (auto& x : k) x = rng() % 5;
      const auto fast = root_trace_on_tree<Rat>(model, k);
      const auto full = run<Rat>(model, with_num_colors(gen_tree({k.begin(), k.end()}), model.num_colors));
      ASSERT_EQ(fast.size(), full.size());
      for (size_t t = 0; t < fast.size(); ++t) ASSERT_EQ(fast[t], full[t][0]) << "t=" << t;
    }
  }
}

TEST(TreeEvaluator, FloatTracksExact) {
  const GnnModel m = fixture("rational_q2_scaled.json");
  const std::vector<uint64_t> k{3, 1, 7};
  const Rat exact = root_trace_on_tree<Rat>(m, k).back()[m.output_coord];
  const double approx = root_trace_on_tree<double>(m, k).back()[m.output_coord];
  EXPECT_NEAR(exact.to_double(), approx, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(Symmetry, FixtureModelsAreRootSymmetric) {
  for (const char* name : {"q2_relu.json", "rational_q2_unit.json", "poly_q2_candidate.json"}) {
    const GnnModel m = fixture(name);
    const auto r = symmetry_check(m, {0, 2, 5, 1});
    EXPECT_TRUE(r.ok) << name;
    EXPECT_EQ(r.permutations_checked, 24u);
  }
}

TEST(Symmetry, RepeatedEntriesCountDistinctArrangements) {
  const auto r = symmetry_check(q2_relu(), {1, 1, 2});
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.permutations_checked, 3u);
  const auto sampled = symmetry_check(q2_relu(), {1, 2, 3, 4, 5}, 10, 7);
  EXPECT_TRUE(sampled.ok);
  EXPECT_EQ(sampled.permutations_checked, 10u);
}

// ---------------------------------------------------------------------------

TEST(DegreeBound, ExpectedValues) {
  GnnModel id;
  id.num_colors = 1;
  id.state_dim = 1;
  id.iterations = 3;
  id.init = Matrix<int>(1, 1, 1);
  id.layers = {GnnLayer::zeros(1, Activation::identity())};
  id.layers[0].B(0, 0) = Rat(1);
  const auto b = degree_bound(id, 3);
  EXPECT_EQ(b.kind, DegreeKind::Total);
  EXPECT_EQ(b.root, std::make_pair(1L, 0L));

  GnnModel sq = id;
  sq.layers[0].activations[0] = Activation::polynomial(Poly{Rat(0), Rat(0), Rat(1)});
  EXPECT_EQ(degree_bound(sq, 2).root, std::make_pair(4L, 0L));

  const GnnModel rat = fixture("rational_q2_unit.json");
  const auto rb = degree_bound(rat, 1);
  EXPECT_EQ(rb.kind, DegreeKind::Partial);
  EXPECT_EQ(rb.root, std::make_pair(0L, 0L));
  EXPECT_EQ(rb.all_vertices, std::make_pair(2L, 2L));

  EXPECT_THROW(degree_bound(q2_relu(), 2), std::invalid_argument);
}

TEST(DegreeBound, PartialBoundGrowsWithWidthForRationalModels) {
  const GnnModel rat = fixture("rational_q2_unit.json");
  const auto narrow = degree_bound(rat, 4, 2), wide = degree_bound(rat, 4, 6);
  EXPECT_LT(narrow.root.second, wide.root.second);
  // Polynomial models: total degree does not depend on the width.
  const GnnModel poly = fixture("poly_q2_candidate.json");
  EXPECT_EQ(degree_bound(poly, 4, 2).root, degree_bound(poly, 4, 6).root);
}

TEST(DegreeBound, BoundsObservedDegreeOnDiagonal) {
  std::mt19937_64 rng(8);
  const Activation sq = Activation::polynomial(Poly{Rat(0), Rat(1), Rat(1)});
  for (int i = 0; i < 40; ++i) {
    const size_t T = 1 + rng() % 3;
    const GnnModel m = random_model(rng, 1 + rng() % 2, T, i % 2 ? sq : Activation::identity());
    const size_t width = 1 + rng() % 3;
    const long bound = degree_bound(m, T).root.first;
    for (size_t coord = 0; coord < m.state_dim; ++coord) {
      std::vector<Rat> values;
      for (uint64_t s = 0; s <= static_cast<uint64_t>(bound) + 2; ++s)
        values.push_back(root_trace_on_tree<Rat>(m, std::vector<uint64_t>(width, s)).back()[coord]);
      EXPECT_LE(interpolated_degree(values), bound);
    }
  }
}

// ---------------------------------------------------------------------------

TEST(BoxMargin, CompiledReluPassesWithExactBits) {
  const auto r = box_margin(q2_relu(), q2(), 3, 12);
  EXPECT_EQ(r.verdict, MarginVerdict::Pass);
  EXPECT_EQ(r.interior_min->value, Rat(1));
  EXPECT_EQ(r.boundary_max->value, Rat(0));
  EXPECT_TRUE(r.symmetry_reduced);
  EXPECT_TRUE(*r.regions_match_query);
  EXPECT_NE(r.verdict_text.find("no violation found in box"), std::string::npos);
  EXPECT_TRUE(report_consistent(r));
  // Non-decreasing tuples of {0..12}^3.
  EXPECT_EQ(r.points_evaluated, 455u);
  EXPECT_EQ(r.points.size(), 455u);
}

TEST(BoxMargin, CompiledModelsNeverFailOnOwnQuery) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    const Formula f = desugar(gen::random_gc2(rng, 5, 1));
    const GnnModel m = compile_gc2_relu(f, 1);
    BoxOptions opt;
    opt.keep_points = false;
    const auto r = box_margin(m, f, 1 + rng() % 4, 6, opt);
    EXPECT_NE(r.verdict, MarginVerdict::Fail) << render(f);
    EXPECT_TRUE(report_consistent(r));
    if (r.verdict == MarginVerdict::Pass) {
      EXPECT_EQ(r.interior_min->value, Rat(1));
      EXPECT_EQ(r.boundary_max->value, Rat(0));
    }
  }
}

TEST(TreeOracle, MatchesGraphSemantics) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen::random_gc2(rng, 6, 2);
    const auto subs = SubformulaList::enumerate(f);
    std::vector<uint64_t> k(1 + rng() % 4);
    for (auto& x : k) x = rng() % 4;
    EXPECT_EQ(eval_on_tree(subs, k), eval(f, with_num_colors(gen_tree({k.begin(), k.end()}), 2), 0)) << render(f);
  }
}

TEST(BoxMargin, RationalFixtureFailsWithWitnesses) {
  BoxOptions opt;
  opt.keep_points = false;
  const auto r = box_margin(fixture("rational_q2_unit.json"), q2(), 3, 10, opt);
  EXPECT_EQ(r.verdict, MarginVerdict::Fail);
  EXPECT_FALSE(r.witnesses.empty());
  EXPECT_TRUE(report_consistent(r));
  // All-ones interior point: z = 3/2, output 1/(1 + 9/4).
  EXPECT_EQ(r.interior_min->k, (std::vector<uint64_t>{1, 1, 1}));
  EXPECT_EQ(r.interior_min->value, Rat(4, 13));
}

TEST(BoxMargin, ScaledFixturePassesSmallBoxButFailsWider) {
  BoxOptions opt;
  opt.keep_points = false;
  const GnnModel m = fixture("rational_q2_scaled.json");
  const auto small = box_margin(m, q2(), 3, 8, opt);
  EXPECT_EQ(small.verdict, MarginVerdict::Pass);
  EXPECT_NE(small.verdict_text.find("not a claim of uniform expressivity"), std::string::npos);
  EXPECT_TRUE(report_consistent(small));
  const auto wide = box_margin(m, q2(), 9, 1, opt);
  EXPECT_EQ(wide.verdict, MarginVerdict::Fail);
  EXPECT_EQ(wide.interior_min->k, std::vector<uint64_t>(9, 1));
  EXPECT_TRUE(report_consistent(wide));
}

TEST(BoxMargin, UndecidedWithoutInterior) {
  const auto r = box_margin(q2_relu(), q2(), 2, 0);
  EXPECT_EQ(r.verdict, MarginVerdict::Undecided);
  EXPECT_TRUE(report_consistent(r));
}

TEST(BoxMargin, EnumeratesNonDecreasingTuples) {
  const auto r = box_margin(q2_relu(), q2(), 2, 3);
  EXPECT_TRUE(r.symmetry_reduced);
  EXPECT_EQ(r.points_evaluated, 10u);
  for (const auto& p : r.points) EXPECT_LE(p.k[0], p.k[1]);
}

TEST(BoxMargin, StreamsPointsAndCsv) {
  BoxOptions opt;
  opt.keep_points = false;
  std::string csv = csv_header(2);
  opt.on_point = [&](const MarginPoint& p) { csv += csv_row(p); };
  const auto r = box_margin(fixture("rational_q2_unit.json"), q2(), 2, 1, opt);
  EXPECT_EQ(csv,
            "k1,k2,value_num,value_den,region\n"
            "0,0,1,5,boundary\n"
            "0,1,4,13,boundary\n"
            "1,1,1,2,interior\n");
  const Json j = report_to_json(r);
  EXPECT_EQ(j["verdict"], "FAIL");
  EXPECT_EQ(j["eps_prime"], "1/10");
  EXPECT_EQ(j["interior_min"]["value"], "1/2");
}

TEST(BoxMargin, ParallelMatchesSerial) {
  BoxOptions a, b;
  a.keep_points = b.keep_points = true;
  b.workers = 3;
  const GnnModel m = fixture("rational_q2_unit.json");
  const auto ra = box_margin(m, q2(), 3, 5, a), rb = box_margin(m, q2(), 3, 5, b);
  ASSERT_EQ(ra.points.size(), rb.points.size());
  for (size_t i = 0; i < ra.points.size(); ++i) EXPECT_EQ(ra.points[i].value, rb.points[i].value);
  EXPECT_EQ(report_to_json(ra), report_to_json(rb));
}

// ---------------------------------------------------------------------------

TEST(CurveSweep, CompiledReluSeparatesByOne) {
  std::vector<uint64_t> ts(20);
  std::iota(ts.begin(), ts.end(), 1);
  const auto rows = curve_sweep(q2_relu(), {1, 1, 1}, ts);
  ASSERT_EQ(rows.size(), 20u);
  for (const auto& row : rows) EXPECT_EQ(row.difference, Rat(1));
  EXPECT_EQ(rows[4].k_interior, (std::vector<uint64_t>{5, 5, 5}));
  EXPECT_EQ(rows[4].k_boundary, (std::vector<uint64_t>{5, 5, 0}));
}

TEST(CurveSweep, RationalFixtureDifferenceApproachesHalf) {
  // Interior tends to s(0) = 1, boundary to s(1) = 1/2.
  std::vector<uint64_t> ts(60);
  std::iota(ts.begin(), ts.end(), 1);
  const auto rows = curve_sweep(fixture("rational_q2_unit.json"), {1, 1, 1}, ts);
  EXPECT_EQ(rows[0].value_interior, Rat(4, 13));
  EXPECT_EQ(rows[0].value_boundary, Rat(1, 5));
  EXPECT_EQ(rows[0].difference, Rat(7, 65));
  for (size_t i = 4; i < rows.size(); ++i) EXPECT_GT(rows[i - 1].difference, rows[i].difference);
  for (const auto& row : rows) EXPECT_LT(row.difference, Rat(1));
  EXPECT_GT(rows.back().difference, Rat(1, 2));
  EXPECT_LT(rows.back().difference, Rat(51, 100));
}

TEST(CurveSweep, GuardsAgainstHugeTrees) {
  EXPECT_THROW(curve_sweep(q2_relu(), {40, 1}, {10}), std::overflow_error);
}

// ---------------------------------------------------------------------------

TEST(SignCheck, LiteralPolynomialHasWitness) {
  const auto r = sign_check(literal_sign_poly(3), 5, Rat(1));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.witness, (std::vector<uint64_t>{2, 0, 0}));
  EXPECT_EQ(r.value, Rat(13));
  EXPECT_EQ(r.branch, "outside");
  EXPECT_TRUE(r.symmetry_reduced);
}

TEST(SignCheck, HypercubeIndicatorSatisfiesPattern) {
  for (size_t m = 1; m <= 4; ++m) {
    const auto r = sign_check(hypercube_indicator_poly(m), 5, Rat(1));
    EXPECT_TRUE(r.ok) << m;
  }
}

TEST(SignCheck, NonSymmetricPolynomialsUseFullGrid) {
  MultiPoly p(2);
  p.add_term({0, 0}, Rat(1)).add_term({1, 0}, Rat(-5));
  const auto r = sign_check(p, 2, Rat(1));
  EXPECT_FALSE(r.symmetry_reduced);
  EXPECT_FALSE(r.ok);
  // Odometer order reaches (0,2), where p = 1 > 0 off the cube.
  EXPECT_EQ(r.witness, (std::vector<uint64_t>{0, 2}));
  EXPECT_EQ(r.value, Rat(1));
  EXPECT_EQ(r.branch, "outside");
}
