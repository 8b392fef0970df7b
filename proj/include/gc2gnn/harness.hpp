#pragma once

// Verification and falsification machinery on the tree family T[k_1..k_m]:
// dominant directions for exponent sets, root symmetry, degree bounds, margin
// sweeps over boxes and curves, and sign checks for symmetric polynomials.
//
// Box and curve sweeps are falsifiers. A FAIL inside a finite box is evidence
// against a candidate model; a PASS only means no violation was found there.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gc2gnn/formula.hpp"
#include "gc2gnn/gnn.hpp"
#include "gc2gnn/graph.hpp"
#include "gc2gnn/model_io.hpp"
#include "gc2gnn/numeric.hpp"
#include "gc2gnn/parallel.hpp"
#include "gc2gnn/parser.hpp"
#include "gc2gnn/semantics.hpp"

namespace gc2gnn {

// ---------------------------------------------------------------------------
// Dominant directions

using IntVec = std::vector<long>;

inline long dot(const IntVec& a, const IntVec& b) {
  long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct DirectionWitness {
  std::vector<IntVec> S, S_prime;
  IntVec x_star;
  std::optional<IntVec> y_star;
  IntVec u;
  /// "sum" for u = x* + y* (or u = x*), "lexicographic" for the fallback.
  std::string construction;
};

namespace detail {

// Euclidean-norm maximizer; ties go to the lexicographically largest vector.
inline IntVec norm_maximizer(const std::vector<IntVec>& S) {
  return *std::max_element(S.begin(), S.end(), [](const IntVec& a, const IntVec& b) {
    long na = dot(a, a), nb = dot(b, b);
    return na != nb ? na < nb : a < b;
  });
}

inline bool strictly_dominates(const IntVec& star, const std::vector<IntVec>& S, const IntVec& u) {
  const long top = dot(star, u);
  for (const auto& x : S)
    if (x != star && dot(x, u) >= top) return false;
  return true;
}

inline void check_exponent_set(const std::vector<IntVec>& S, size_t p, const char* name) {
  for (const auto& x : S) {
    if (x.size() != p) throw std::invalid_argument(std::string(name) + ": vectors must share one length");
    for (long e : x)
      if (e < 0) throw std::invalid_argument(std::string(name) + ": entries must be non-negative");
  }
}

}  // namespace detail

/// Picks x* (and y*) with a direction u making them strict maximizers of
/// <., u>. Tries u = x* + y* first and falls back to u = N x* + y* with y*
/// maximizing <., x*> when the sum is not strictly dominant.
inline DirectionWitness dominant_direction(const std::vector<IntVec>& S, const std::vector<IntVec>& S_prime = {}) {
  if (S.empty()) throw std::invalid_argument("dominant_direction: S is empty");
  const size_t p = S.front().size();
  detail::check_exponent_set(S, p, "S");
  detail::check_exponent_set(S_prime, p, "S'");
  DirectionWitness w{S, S_prime, detail::norm_maximizer(S), std::nullopt, {}, "sum"};
  if (dot(w.x_star, w.x_star) == 0) throw std::invalid_argument("dominant_direction: S contains only the zero vector");
  w.u = w.x_star;
  if (S_prime.empty()) return w;

  w.y_star = detail::norm_maximizer(S_prime);
  for (size_t i = 0; i < p; ++i) w.u[i] += (*w.y_star)[i];
  if (detail::strictly_dominates(w.x_star, S, w.u) && detail::strictly_dominates(*w.y_star, S_prime, w.u)) return w;

  // Lexicographic order (<., x*>, <., y*>) realized with integer weights.
  IntVec best = S_prime.front();
  for (const auto& y : S_prime) {
    long a = dot(y, w.x_star), b = dot(best, w.x_star);
    if (a > b || (a == b && (dot(y, y) > dot(best, best) || (dot(y, y) == dot(best, best) && y > best)))) best = y;
  }
  w.y_star = best;
  long gap = 0;
  for (const auto& x : S) gap = std::max(gap, std::labs(dot(x, best) - dot(w.x_star, best)));
  for (const auto& y : S_prime) gap = std::max(gap, std::labs(dot(y, best) - dot(best, best)));
  const long N = gap + 1;
  for (size_t i = 0; i < p; ++i) w.u[i] = N * w.x_star[i] + best[i];
  w.construction = "lexicographic";
  return w;
}

struct DominanceCheck {
  bool ok = true;
  std::string counterexample;
};

/// Brute-force check of every strict inequality a witness promises.
inline DominanceCheck verify_dominance(const DirectionWitness& w) {
  auto describe = [](const IntVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
  };
  auto check_set = [&](const IntVec& star, const std::vector<IntVec>& S, const char* name) -> DominanceCheck {
    if (std::find(S.begin(), S.end(), star) == S.end())
      return {false, std::string(name) + " maximizer " + describe(star) + " is not in the set"};
    const long top = dot(star, w.u);
    if (S.size() == 1) {
      if (dot(star, star) > 0 && top <= 0)
        return {false, std::string(name) + ": <" + describe(star) + ",u> = " + std::to_string(top) + " is not > 0"};
      return {};
    }
    for (const auto& x : S)
      if (x != star && dot(x, w.u) >= top)
        return {false, std::string(name) + ": <" + describe(x) + ",u> = " + std::to_string(dot(x, w.u)) +
                           " >= <" + describe(star) + ",u> = " + std::to_string(top)};
    return {};
  };
  if (auto r = check_set(w.x_star, w.S, "S"); !r.ok) return r;
  if (w.y_star)
    if (auto r = check_set(*w.y_star, w.S_prime, "S'"); !r.ok) return r;
  return {};
}

// ---------------------------------------------------------------------------
// Tree family evaluation

namespace detail {

inline LabeledGraph tree_for_model(const GnnModel& m, const std::vector<uint32_t>& k) {
  return with_num_colors(gen_tree(k), m.num_colors);
}

}  // namespace detail

/// Root embeddings xi^t(s), t = 0..T, on T[k] without materializing the tree:
/// all leaves under one child share a state.
template <class S>
std::vector<std::vector<S>> root_trace_on_tree(const GnnModel& model, std::span<const uint64_t> k) {
  validate_model(model);
  const size_t d = model.state_dim, m = k.size();
  std::vector<CompiledLayer<S>> layers;
  for (const auto& L : model.layers) layers.emplace_back(L);
  const auto x0 = initial_state<S>(model, 1);
  std::vector<S> root = x0;
  std::vector<std::vector<S>> child(m, x0), leaf(m, x0);
  std::vector<S> mult(m);
  for (size_t j = 0; j < m; ++j) mult[j] = scalar_from<S>(Rat(static_cast<long>(k[j])));

  std::vector<std::vector<S>> out{root};
  std::vector<S> nb(d), next_root(d);
  std::vector<std::vector<S>> next_child(m, std::vector<S>(d)), next_leaf(m, std::vector<S>(d));
  const S zero = scalar_from<S>(Rat(0));
  for (size_t t = 0; t < model.iterations; ++t) {
    const auto& layer = layers[model.recurrent ? 0 : t];
    std::fill(nb.begin(), nb.end(), zero);
    for (size_t j = 0; j < m; ++j)
      for (size_t i = 0; i < d; ++i) nb[i] += child[j][i];
    layer.apply(root, nb, next_root);
    const bool last = t + 1 == model.iterations;
    if (!last) {
      for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < d; ++i) nb[i] = root[i] + (k[j] ? mult[j] * leaf[j][i] : zero);
        layer.apply(child[j], nb, next_child[j]);
        if (k[j]) layer.apply(leaf[j], child[j], next_leaf[j]);
      }
      std::swap(child, next_child);
      std::swap(leaf, next_leaf);
    }
    std::swap(root, next_root);
    out.push_back(root);
  }
  return out;
}

struct SymmetryResult {
  bool ok = true;
  size_t permutations_checked = 0;
  std::vector<uint32_t> witness_k, witness_permuted;
  size_t witness_iteration = 0;
};

/// Runs the model on T[k] and T[pi(k)] and compares root embeddings at every
/// iteration. Exhaustive over distinct arrangements when trials == 0 or there
/// are at most `trials` of them; otherwise `trials` random permutations.
inline SymmetryResult symmetry_check(const GnnModel& model, const std::vector<uint32_t>& k, size_t trials = 0,
                                     uint64_t seed = 1) {
  SymmetryResult res;
  auto root_of = [&](const std::vector<uint32_t>& kk) {
    auto trace = run<Rat>(model, detail::tree_for_model(model, kk));
    std::vector<std::vector<Rat>> roots;
    for (const auto& state : trace) roots.push_back(state[0]);
    return roots;
  };
  const auto reference = root_of(k);
  auto compare = [&](const std::vector<uint32_t>& perm) {
    ++res.permutations_checked;
    const auto other = root_of(perm);
    for (size_t t = 0; t < reference.size(); ++t)
      if (reference[t] != other[t]) {
        res = {false, res.permutations_checked, k, perm, t};
        return false;
      }
    return true;
  };

  std::vector<uint32_t> sorted = k;
  std::sort(sorted.begin(), sorted.end());
  // Count distinct arrangements, saturating.
  size_t arrangements = 0;
  {
    std::vector<uint32_t> p = sorted;
    do {
      ++arrangements;
    } while (arrangements <= trials && std::next_permutation(p.begin(), p.end()));
  }
  if (trials == 0 || arrangements <= trials) {
    std::vector<uint32_t> p = sorted;
    do {
      if (!compare(p)) return res;
    } while (std::next_permutation(p.begin(), p.end()));
  } else {
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < trials; ++i) {
      std::vector<uint32_t> p = k;
      std::shuffle(p.begin(), p.end(), rng);
      if (!compare(p)) return res;
    }
  }
  return res;
}

/// Truth of the enumerated formula at the root of the unicolored T[k].
inline bool eval_on_tree(const SubformulaList& subs, std::span<const uint64_t> k) {
  const size_t n = subs.size(), m = k.size();
  std::vector<char> root(n);
  std::vector<std::vector<char>> child(m, std::vector<char>(n)), leaf(m, std::vector<char>(n));
  for (size_t i = 0; i < n; ++i) {
    const Formula& f = subs[i];
    const auto [a, b] = subs.children(i);
    auto set = [&](auto&& rule) {
      root[i] = rule(root, a, b);
      for (size_t j = 0; j < m; ++j) child[j][i] = rule(child[j], a, b), leaf[j][i] = rule(leaf[j], a, b);
    };
    switch (f.kind()) {
      case NodeKind::Color: set([&](auto&, int, int) { return f.value() == 1; }); break;
      case NodeKind::Top: set([](auto&, int, int) { return true; }); break;
      case NodeKind::Not: set([](auto& s, int x, int) { return !s[x]; }); break;
      case NodeKind::And: set([](auto& s, int x, int y) { return s[x] && s[y]; }); break;
      case NodeKind::Or: set([](auto& s, int x, int y) { return s[x] || s[y]; }); break;
      case NodeKind::ExistsGeq: {
        const uint64_t need = f.value();
        uint64_t at_root = 0;
        for (size_t j = 0; j < m; ++j) at_root += child[j][a];
        root[i] = at_root >= need;
        for (size_t j = 0; j < m; ++j) {
          child[j][i] = static_cast<uint64_t>(root[a]) + (leaf[j][a] ? k[j] : 0) >= need;
          leaf[j][i] = static_cast<uint64_t>(child[j][a]) >= need;
        }
        break;
      }
    }
  }
  return root[n - 1];
}

// ---------------------------------------------------------------------------
// Degree bounds

enum class DegreeKind { Total, Partial };

struct DegreeBound {
  size_t iteration = 0;
  DegreeKind kind = DegreeKind::Total;
  /// (numerator, denominator) degree bound of the root embedding.
  std::pair<long, long> root{0, 0};
  /// Same bound maximized over every vertex type of the tree.
  std::pair<long, long> all_vertices{0, 0};
  /// Width used for partial bounds (number of children of the root).
  size_t width = 0;
};

namespace detail {

struct Frac {
  long n = 0, d = 0;
  friend bool operator==(const Frac&, const Frac&) = default;
};

// Sum of fractions with unrelated denominators.
inline Frac sum_fracs(const std::vector<std::pair<Frac, size_t>>& terms) {
  long dsum = 0;
  for (const auto& [f, count] : terms) dsum += f.d * static_cast<long>(count);
  long n = 0;
  for (const auto& [f, count] : terms)
    if (count) n = std::max(n, f.n + dsum - f.d);
  return {n, dsum};
}

inline Frac activate(const Frac& z, const std::vector<Activation>& acts) {
  Frac out;
  for (const auto& a : acts) {
    Frac r;
    if (a.kind() == ActivationKind::Identity) {
      r = z;
    } else {
      auto [p, q] = *a.algebraic_degree();
      const long hi = std::max(z.n, z.d);
      r = {p * hi + q * z.d, q * hi + p * z.d};
    }
    out.n = std::max(out.n, r.n);
    out.d = std::max(out.d, r.d);
  }
  return out;
}

}  // namespace detail

/// Degree bounds in k for embeddings on T[k_1..k_m] after t iterations.
/// Polynomial/identity models get total-degree bounds (independent of m);
/// models with rational activations get per-variable bounds in one k_j,
/// which are computed for the given width m.
inline DegreeBound degree_bound(const GnnModel& model, size_t t, size_t m = 2) {
  validate_model(model);
  bool rational = false;
  for (const auto& L : model.layers)
    for (const auto& a : L.activations) {
      if (!a.algebraic_degree())
        throw std::invalid_argument(std::string("degree_bound: activation '") + to_string(a.kind()) +
                                    "' is not polynomial or rational");
      if (a.kind() == ActivationKind::Rational) rational = true;
    }
  if (!model.recurrent && t > model.iterations) throw std::invalid_argument("degree_bound: t exceeds layer count");

  using detail::Frac;
  const size_t ds = model.state_dim;
  auto scaled = [](Frac f) { return Frac{f.n + 1, f.d}; };
  DegreeBound res;
  res.iteration = t;
  res.kind = rational ? DegreeKind::Partial : DegreeKind::Total;
  res.width = rational ? m : 0;

  // Types: root, own child x_j, own leaf, other child x_i, other leaf.
  Frac R, X, L, Y, Z;
  for (size_t step = 0; step < t; ++step) {
    const auto& acts = model.layer_at(step).activations;
    auto pre = [&](const Frac& self, std::vector<std::pair<Frac, size_t>> nbrs) {
      std::vector<std::pair<Frac, size_t>> terms{{self, ds}, {Frac{}, 1}};
      for (auto& [f, c] : nbrs) terms.emplace_back(f, c * ds);
      return detail::activate(detail::sum_fracs(terms), acts);
    };
    Frac nR, nX, nL, nY, nZ;
    if (rational) {
      nR = pre(R, {{X, 1}, {Y, m - 1}});
      nX = pre(X, {{R, 1}, {scaled(L), 1}});
      nL = pre(L, {{X, 1}});
      nY = pre(Y, {{R, 1}, {Z, 1}});
      nZ = pre(Z, {{Y, 1}});
    } else {
      // Total degree: every child owns its variable.
      nR = pre(R, {{X, 1}});
      nX = pre(X, {{R, 1}, {scaled(L), 1}});
      nL = pre(L, {{X, 1}});
      nY = nX;
      nZ = nL;
    }
    R = nR, X = nX, L = nL, Y = nY, Z = nZ;
  }
  res.root = {R.n, R.d};
  long an = 0, ad = 0;
  for (const Frac& f : {R, X, L, Y, Z}) an = std::max(an, f.n), ad = std::max(ad, f.d);
  res.all_vertices = {an, ad};
  return res;
}

// ---------------------------------------------------------------------------
// Margin sweeps

enum class MarginVerdict { Pass, Fail, Undecided };

inline const char* to_string(MarginVerdict v) {
  switch (v) {
    case MarginVerdict::Pass: return "PASS";
    case MarginVerdict::Fail: return "FAIL";
    case MarginVerdict::Undecided: return "UNDECIDED";
  }
  return "?";
}

struct MarginPoint {
  std::vector<uint64_t> k;
  Rat value;
  bool interior = false;
};

struct MarginReport {
  std::string query;
  std::string model_name;
  size_t m = 0;
  uint64_t k_max = 0;
  Rat eps_prime{1, 10};
  bool symmetry_reduced = false;
  size_t points_evaluated = 0;
  std::optional<MarginPoint> interior_min;
  std::optional<MarginPoint> boundary_max;
  std::vector<MarginPoint> points;     // every point, when requested
  std::vector<MarginPoint> witnesses;  // violating points (capped)
  size_t violations = 0;
  MarginVerdict verdict = MarginVerdict::Undecided;
  std::string verdict_text;
  /// Whether the query holds exactly on the points with every k_i >= 1.
  std::optional<bool> regions_match_query;
};

inline Rat upper_threshold(const Rat& eps_prime) { return Rat(1, 2) + eps_prime; }
inline Rat lower_threshold(const Rat& eps_prime) { return Rat(1, 2) - eps_prime; }

inline bool violates(const MarginPoint& p, const Rat& eps_prime) {
  return p.interior ? p.value < upper_threshold(eps_prime) : p.value > lower_threshold(eps_prime);
}

namespace detail {

inline std::string kvec(const std::vector<uint64_t>& k) {
  std::string s = "(";
  for (size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + ")";
}

inline void finalize(MarginReport& r) {
  const std::string box = "m=" + std::to_string(r.m) + ", K_max=" + std::to_string(r.k_max) +
                          ", eps'=" + r.eps_prime.str();
  if (!r.interior_min || !r.boundary_max) {
    r.verdict = MarginVerdict::Undecided;
    r.verdict_text = "UNDECIDED: the box has no " + std::string(!r.interior_min ? "interior" : "boundary") +
                     " points (" + box + ")";
    return;
  }
  if (r.violations == 0) {
    r.verdict = MarginVerdict::Pass;
    r.verdict_text = "PASS: no violation found in box (" + box +
                     "); finite-box evidence only, not a claim of uniform expressivity";
  } else {
    r.verdict = MarginVerdict::Fail;
    r.verdict_text = "FAIL: " + std::to_string(r.violations) + " margin violation(s) in box (" + box +
                     "); interior_min=" + r.interior_min->value.str() + " at " + kvec(r.interior_min->k) +
                     ", boundary_max=" + r.boundary_max->value.str() + " at " + kvec(r.boundary_max->k);
  }
}

// Advances k to the next non-decreasing tuple in {0..kmax}^m.
inline bool next_nondecreasing(std::vector<uint64_t>& k, uint64_t kmax) {
  for (size_t i = k.size(); i-- > 0;) {
    if (k[i] < kmax) {
      ++k[i];
      for (size_t j = i + 1; j < k.size(); ++j) k[j] = k[i];
      return true;
    }
  }
  return false;
}

inline bool next_tuple(std::vector<uint64_t>& k, uint64_t kmax) {
  for (size_t i = k.size(); i-- > 0;) {
    if (k[i] < kmax) {
      ++k[i];
      return true;
    }
    k[i] = 0;
  }
  return false;
}

}  // namespace detail

struct BoxOptions {
  Rat eps_prime{1, 10};
  bool keep_points = true;
  size_t max_witnesses = 16;
  unsigned workers = 1;
  std::string model_name;
  /// Called for each evaluated point in enumeration order.
  std::function<void(const MarginPoint&)> on_point;
};

/// Evaluates the model's output coordinate at the root of T[k] for k in
/// {0..k_max}^m (non-decreasing k only, once root symmetry has been
/// confirmed at this m). A point is interior when the query holds at the
/// root; without a query, when all k_i >= 1. For Q_p both coincide.
inline MarginReport box_margin(const GnnModel& model, const std::optional<Formula>& query, size_t m, uint64_t k_max,
                               const BoxOptions& opt = {}) {
  if (m < 1) throw std::invalid_argument("box_margin: m must be >= 1");
  MarginReport r;
  r.query = query ? render(*query) : "";
  r.model_name = opt.model_name;
  r.m = m;
  r.k_max = k_max;
  r.eps_prime = opt.eps_prime;

  std::optional<SubformulaList> subs;
  if (query) {
    subs = SubformulaList::enumerate(*query);
    r.regions_match_query = true;
  }

  {
    std::vector<uint32_t> probe(m);
    for (size_t i = 0; i < m; ++i) probe[i] = static_cast<uint32_t>(std::min<uint64_t>(i, k_max));
    r.symmetry_reduced = symmetry_check(model, probe, m <= 5 ? 0 : 64).ok;
  }

  // Enumerate in blocks so worker threads share the evaluation.
  const size_t block = 4096;
  std::vector<uint64_t> cursor(m, 0);
  bool more = true;
  while (more) {
    std::vector<std::vector<uint64_t>> ks;
    while (more && ks.size() < block) {
      ks.push_back(cursor);
      more = r.symmetry_reduced ? detail::next_nondecreasing(cursor, k_max) : detail::next_tuple(cursor, k_max);
    }
    std::vector<Rat> values(ks.size());
    parallel_for(ks.size(), opt.workers, [&](size_t i) {
      values[i] = root_trace_on_tree<Rat>(model, ks[i]).back()[model.output_coord];
    });
    for (size_t i = 0; i < ks.size(); ++i) {
      MarginPoint p{std::move(ks[i]), std::move(values[i]), false};
      const bool all_positive = std::all_of(p.k.begin(), p.k.end(), [](uint64_t v) { return v > 0; });
      p.interior = subs ? eval_on_tree(*subs, p.k) : all_positive;
      if (subs && p.interior != all_positive) r.regions_match_query = false;
      ++r.points_evaluated;
      if (p.interior) {
        if (!r.interior_min || p.value < r.interior_min->value) r.interior_min = p;
      } else {
        if (!r.boundary_max || p.value > r.boundary_max->value) r.boundary_max = p;
      }
      if (violates(p, r.eps_prime)) {
        ++r.violations;
        if (r.witnesses.size() < opt.max_witnesses) r.witnesses.push_back(p);
      }
      if (opt.on_point) opt.on_point(p);
      if (opt.keep_points) r.points.push_back(std::move(p));
    }
  }
  // The extreme points are always reported when they violate.
  for (const auto* extreme : {&r.interior_min, &r.boundary_max})
    if (*extreme && violates(**extreme, r.eps_prime) &&
        std::none_of(r.witnesses.begin(), r.witnesses.end(), [&](const MarginPoint& w) { return w.k == (*extreme)->k; }))
      r.witnesses.push_back(**extreme);
  detail::finalize(r);
  return r;
}

/// Checks that a report's verdict follows from its own numbers.
inline bool report_consistent(const MarginReport& r) {
  if (!r.interior_min || !r.boundary_max) return r.verdict == MarginVerdict::Undecided;
  const bool pass = r.interior_min->value >= upper_threshold(r.eps_prime) &&
                    r.boundary_max->value <= lower_threshold(r.eps_prime);
  if (pass != (r.verdict == MarginVerdict::Pass)) return false;
  if (pass != (r.violations == 0)) return false;
  if (!pass && r.witnesses.empty()) return false;
  for (const auto& w : r.witnesses)
    if (!violates(w, r.eps_prime)) return false;
  if (r.verdict == MarginVerdict::Pass && r.verdict_text.find("no violation found in box") == std::string::npos)
    return false;
  return true;
}

struct CurveRow {
  uint64_t t = 0;
  std::vector<uint64_t> k_interior, k_boundary;
  Rat value_interior, value_boundary, difference;
};

/// For each t compares the root output on T[(t^u_1, ..., t^u_m)] with
/// T[(t^u_1, ..., t^u_{m-1}, 0)].
inline std::vector<CurveRow> curve_sweep(const GnnModel& model, const std::vector<uint64_t>& u,
                                         const std::vector<uint64_t>& t_values) {
  if (u.empty()) throw std::invalid_argument("curve_sweep: direction must be non-empty");
  auto power = [](uint64_t base, uint64_t e) {
    uint64_t r = 1;
    for (uint64_t i = 0; i < e; ++i) {
      if (base != 0 && r > std::numeric_limits<uint32_t>::max() / base)
        throw std::overflow_error("curve_sweep: t^u exceeds the supported tree size");
      r *= base;
    }
    return r;
  };
  std::vector<CurveRow> rows;
  for (uint64_t t : t_values) {
    CurveRow row;
    row.t = t;
    for (uint64_t e : u) row.k_interior.push_back(power(t, e));
    row.k_boundary = row.k_interior;
    row.k_boundary.back() = 0;
    row.value_interior = root_trace_on_tree<Rat>(model, row.k_interior).back()[model.output_coord];
    row.value_boundary = root_trace_on_tree<Rat>(model, row.k_boundary).back()[model.output_coord];
    row.difference = row.value_interior - row.value_boundary;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sign patterns of symmetric polynomials

struct SignCheckResult {
  bool ok = true;
  std::vector<uint64_t> witness;
  Rat value;
  /// "cube" when the witness lies in {0,1}^m, "outside" otherwise.
  std::string branch;
  bool symmetry_reduced = false;
  size_t points_checked = 0;
};

/// p >= eps on {0,1}^m and p <= -eps on the rest of {0..k_max}^m. Symmetric
/// polynomials are checked on non-increasing tuples only.
inline SignCheckResult sign_check(const MultiPoly& p, uint64_t k_max, const Rat& eps) {
  const size_t m = p.arity();
  SignCheckResult res;
  res.symmetry_reduced = p.is_symmetric();
  std::vector<uint64_t> k(m, 0);
  for (;;) {
    bool representative = true;
    if (res.symmetry_reduced)
      for (size_t i = 0; i + 1 < m; ++i)
        if (k[i] < k[i + 1]) representative = false;
    if (representative) {
      ++res.points_checked;
      std::vector<Rat> x;
      for (auto v : k) x.emplace_back(static_cast<long>(v));
      Rat v = p.eval(x);
      const bool cube = std::all_of(k.begin(), k.end(), [](uint64_t e) { return e <= 1; });
      const bool bad = cube ? v < eps : v > -eps;
      if (bad) return {false, k, v, cube ? "cube" : "outside", res.symmetry_reduced, res.points_checked};
    }
    // Odometer with the first coordinate most significant.
    size_t i = m;
    while (i-- > 0) {
      if (k[i] < k_max) {
        ++k[i];
        break;
      }
      k[i] = 0;
    }
    if (i == static_cast<size_t>(-1)) break;
  }
  return res;
}

/// 1 - sum x_i^2 + sum x_i^4.
inline MultiPoly literal_sign_poly(size_t m) {
  MultiPoly p(m);
  p.add_term(std::vector<unsigned>(m, 0), Rat(1));
  for (size_t i = 0; i < m; ++i) {
    std::vector<unsigned> e(m, 0);
    e[i] = 2;
    p.add_term(e, Rat(-1));
    e[i] = 4;
    p.add_term(e, Rat(1));
  }
  return p;
}

/// 1 - sum x_i^2 (x_i - 1)^2 = 1 - sum (x_i^4 - 2 x_i^3 + x_i^2).
inline MultiPoly hypercube_indicator_poly(size_t m) {
  MultiPoly p(m);
  p.add_term(std::vector<unsigned>(m, 0), Rat(1));
  for (size_t i = 0; i < m; ++i) {
    std::vector<unsigned> e(m, 0);
    e[i] = 4;
    p.add_term(e, Rat(-1));
    e[i] = 3;
    p.add_term(e, Rat(2));
    e[i] = 2;
    p.add_term(e, Rat(-1));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Report serialization

inline Json point_to_json(const MarginPoint& p) {
  return {{"k", p.k}, {"value", p.value.str()}, {"region", p.interior ? "interior" : "boundary"}};
}

inline Json report_to_json(const MarginReport& r) {
  Json j;
  j["query"] = r.query;
  j["model"] = r.model_name;
  j["m"] = r.m;
  j["k_max"] = r.k_max;
  j["eps_prime"] = r.eps_prime.str();
  j["symmetry_reduced"] = r.symmetry_reduced;
  j["points_evaluated"] = r.points_evaluated;
  j["interior_min"] = r.interior_min ? point_to_json(*r.interior_min) : Json();
  j["boundary_max"] = r.boundary_max ? point_to_json(*r.boundary_max) : Json();
  j["violations"] = r.violations;
  Json w = Json::array();
  for (const auto& p : r.witnesses) w.push_back(point_to_json(p));
  j["witnesses"] = std::move(w);
  j["verdict"] = to_string(r.verdict);
  j["verdict_text"] = r.verdict_text;
  j["regions_match_query"] = r.regions_match_query ? Json(*r.regions_match_query) : Json();
  return j;
}

inline std::string csv_header(size_t m) {
  std::string h;
  for (size_t i = 1; i <= m; ++i) h += "k" + std::to_string(i) + ",";
  return h + "value_num,value_den,region\n";
}

inline std::string csv_row(const MarginPoint& p) {
  std::string s;
  for (auto v : p.k) s += std::to_string(v) + ",";
  return s + p.value.numerator().get_str() + "," + p.value.denominator().get_str() + "," +
         (p.interior ? "interior" : "boundary") + "\n";
}

inline Json curve_to_json(const std::vector<CurveRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back({{"t", r.t},
                 {"k_interior", r.k_interior},
                 {"k_boundary", r.k_boundary},
                 {"value_interior", r.value_interior.str()},
                 {"value_boundary", r.value_boundary.str()},
                 {"difference", r.difference.str()}});
  return a;
}

inline std::string curve_to_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "t,value_interior,value_boundary,difference,difference_approx\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.value_interior.str() << ',' << r.value_boundary.str() << ',' << r.difference.str() << ','
       << r.difference.to_double() << '\n';
  return os.str();
}

}  // namespace gc2gnn
