#pragma once

#include <random>
#include <vector>

#include "gc2gnn/formula.hpp"
#include "gc2gnn/gnn.hpp"
#include "gc2gnn/graph.hpp"

namespace gc2gnn::gen {

inline uint32_t uniform(std::mt19937_64& rng, uint32_t lo, uint32_t hi) {
  return std::uniform_int_distribution<uint32_t>(lo, hi)(rng);
}

/// Random GC2 formula of depth at most max_depth over colors 1..num_colors.
inline Formula random_gc2(std::mt19937_64& rng, unsigned max_depth, uint32_t num_colors, bool allow_sugar = true) {
  if (max_depth <= 1) {
    if (allow_sugar && uniform(rng, 0, 9) == 0) return Formula::top();
    return Formula::color(uniform(rng, 1, num_colors));
  }
  switch (uniform(rng, 0, allow_sugar ? 5 : 4)) {
    case 0: return Formula::color(uniform(rng, 1, num_colors));
    case 1: return Formula::negate(random_gc2(rng, max_depth - 1, num_colors, allow_sugar));
    case 2:
      return Formula::conj(random_gc2(rng, max_depth - 1, num_colors, allow_sugar),
                           random_gc2(rng, max_depth - 1, num_colors, allow_sugar));
    case 3:
    case 4: return Formula::exists_geq(uniform(rng, 1, 3), random_gc2(rng, max_depth - 1, num_colors, allow_sugar));
    default:
      return Formula::disj(random_gc2(rng, max_depth - 1, num_colors, allow_sugar),
                           random_gc2(rng, max_depth - 1, num_colors, allow_sugar));
  }
}

/// Random RGC2 formula: a base atom, up to max_chain - 1 guarded hops, and an
/// optional top-level negation.
inline Formula random_rgc2(std::mt19937_64& rng, unsigned max_chain, uint32_t max_k, uint32_t num_colors) {
  const Formula col = Formula::color(uniform(rng, 1, num_colors));
  Formula f = col;
  switch (uniform(rng, 0, 2)) {
    case 0: break;
    case 1: f = Formula::negate(col); break;
    default: f = Formula::exists_geq(uniform(rng, 1, max_k), col); break;
  }
  const unsigned hops = uniform(rng, 0, max_chain - 1);
  for (unsigned i = 0; i < hops; ++i) f = Formula::exists_geq(1, f);
  if (uniform(rng, 0, 1)) f = Formula::negate(f);
  return f;
}

inline LabeledGraph random_graph(std::mt19937_64& rng, uint32_t max_n, uint32_t num_colors) {
  const uint32_t n = uniform(rng, 1, max_n);
  const double p = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
  return gen_random(n, num_colors, p, rng());
}

}  // namespace gc2gnn::gen
