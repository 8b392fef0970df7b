#pragma once

// Color refinement (1-WL) and the refinement order between embeddings.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gc2gnn/graph.hpp"

namespace gc2gnn {

using ClassId = uint32_t;

struct RefinementTrace {
  /// rounds[t][v] = class of v under cr^t; ids dense, by first appearance.
  std::vector<std::vector<ClassId>> rounds;
  /// Smallest t with cr^{t+1} inducing the same partition as cr^t, if seen.
  std::optional<size_t> stable_round;

  size_t class_count(size_t t) const {
    return rounds[t].empty() ? 0 : *std::max_element(rounds[t].begin(), rounds[t].end()) + 1;
  }
};

/// Rounds 0..max_rounds when given (stable_round recorded if reached),
/// otherwise until the partition stops changing.
inline RefinementTrace color_refine(const LabeledGraph& g, std::optional<size_t> max_rounds = std::nullopt) {
  RefinementTrace tr;
  const size_t n = g.size();
  {
    std::map<uint32_t, ClassId> ids;
    std::vector<ClassId> r0(n);
    for (Vertex v = 0; v < n; ++v) r0[v] = ids.emplace(g.color[v], static_cast<ClassId>(ids.size())).first->second;
    tr.rounds.push_back(std::move(r0));
  }
  for (size_t t = 0; !max_rounds || t < *max_rounds; ++t) {
    const auto& prev = tr.rounds.back();
    std::map<std::pair<ClassId, std::vector<ClassId>>, ClassId> interned;
    std::vector<ClassId> next(n);
    for (Vertex v = 0; v < n; ++v) {
      std::vector<ClassId> nb;
      nb.reserve(g.degree(v));
      for (Vertex w : g.neighbors(v)) nb.push_back(prev[w]);
      std::sort(nb.begin(), nb.end());
      auto key = std::make_pair(prev[v], std::move(nb));
      next[v] = interned.emplace(std::move(key), static_cast<ClassId>(interned.size())).first->second;
    }
    // Refinement never merges classes, so equal counts mean equal partitions.
    const bool unchanged = interned.size() == tr.class_count(t);
    tr.rounds.push_back(std::move(next));
    if (unchanged && !tr.stable_round) {
      tr.stable_round = t;
      if (!max_rounds) break;
    }
  }
  return tr;
}

/// Per-round CSV: round,vertex,class.
inline std::string trace_to_csv(const RefinementTrace& tr) {
  std::ostringstream os;
  os << "round,vertex,class\n";
  for (size_t t = 0; t < tr.rounds.size(); ++t)
    for (size_t v = 0; v < tr.rounds[t].size(); ++v) os << t << ',' << v << ',' << tr.rounds[t][v] << '\n';
  return os.str();
}

template <class Key>
struct RefinesResult {
  bool ok = true;
  /// Keys equal under `fine` but distinct under `coarse`.
  std::optional<std::pair<Key, Key>> witness;
};

/// `fine` refines `coarse` iff fine(a) == fine(b) implies coarse(a) == coarse(b).
template <class Key, class F, class C>
RefinesResult<Key> check_refines(const std::map<Key, F>& fine, const std::map<Key, C>& coarse) {
  if (fine.size() != coarse.size()) throw std::invalid_argument("check_refines: key sets differ");
  for (auto a = fine.begin(), b = coarse.begin(); a != fine.end(); ++a, ++b)
    if (a->first != b->first) throw std::invalid_argument("check_refines: key sets differ");
  std::map<F, Key> representative;
  for (const auto& [key, value] : fine) {
    auto [it, fresh] = representative.emplace(value, key);
    if (!fresh && !(coarse.at(it->second) == coarse.at(key))) return {false, std::make_pair(it->second, key)};
  }
  return {};
}

}  // namespace gc2gnn
