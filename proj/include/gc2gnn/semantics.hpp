#pragma once

// Brute-force GC2 model checker used as ground truth for compiled models.

#include <stdexcept>
#include <string>
#include <vector>

#include "gc2gnn/formula.hpp"
#include "gc2gnn/graph.hpp"

namespace gc2gnn {

/// One bit per vertex.
using SatVector = std::vector<bool>;

/// Truth values of every entry of `subs` at every vertex, entry by entry.
inline std::vector<SatVector> eval_subformulas(const SubformulaList& subs, const LabeledGraph& g) {
  const size_t n = g.size();
  std::vector<SatVector> sat(subs.size(), SatVector(n, false));
  for (size_t i = 0; i < subs.size(); ++i) {
    const Formula& f = subs[i];
    auto [l, r] = subs.children(i);
    SatVector& out = sat[i];
    switch (f.kind()) {
      case NodeKind::Color:
        if (f.value() > g.num_colors)
          throw std::out_of_range("color atom col(" + std::to_string(f.value()) + ") exceeds the graph's " +
                                  std::to_string(g.num_colors) + " colors");
        for (Vertex v = 0; v < n; ++v) out[v] = g.color[v] == f.value();
        break;
      case NodeKind::Top:
        out.assign(n, true);
        break;
      case NodeKind::Not:
        for (Vertex v = 0; v < n; ++v) out[v] = !sat[l][v];
        break;
      case NodeKind::And:
        for (Vertex v = 0; v < n; ++v) out[v] = sat[l][v] && sat[r][v];
        break;
      case NodeKind::Or:
        for (Vertex v = 0; v < n; ++v) out[v] = sat[l][v] || sat[r][v];
        break;
      case NodeKind::ExistsGeq:
        for (Vertex v = 0; v < n; ++v) {
          uint32_t count = 0;
          for (Vertex w : g.neighbors(v)) count += sat[l][w] ? 1 : 0;
          out[v] = count >= f.value();
        }
        break;
    }
  }
  return sat;
}

inline SatVector eval_all(const Formula& f, const LabeledGraph& g) {
  auto subs = SubformulaList::enumerate(f);
  return eval_subformulas(subs, g).back();
}

inline bool eval(const Formula& f, const LabeledGraph& g, Vertex v) {
  if (v >= g.size()) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  return eval_all(f, g)[v];
}

}  // namespace gc2gnn
