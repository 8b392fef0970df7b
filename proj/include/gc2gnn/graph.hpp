#pragma once

// Finite simple undirected vertex-colored graphs, the tree family T[k_1..k_m],
// random generation and the text format
//
//   graph <n> <colors>
//   v <id> <color>        (one line per vertex, all n required)
//   e <u> <v>             (u < v, each edge once)
//
// with '#' comments allowed anywhere.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gc2gnn {

using Vertex = uint32_t;

struct LabeledGraph {
  uint32_t num_colors = 1;
  std::vector<uint32_t> color;                // 1-based color per vertex
  std::vector<std::vector<Vertex>> adjacency;  // sorted neighbor lists

  size_t size() const { return color.size(); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency[v]; }
  size_t degree(Vertex v) const { return adjacency[v].size(); }
  size_t edge_count() const {
    size_t s = 0;
    for (const auto& a : adjacency) s += a.size();
    return s / 2;
  }
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < size(); ++u)
      for (Vertex w : adjacency[u])
        if (u < w) out.emplace_back(u, w);
    return out;
  }
  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

enum class ViolationKind { ColorRange, SizeMismatch, NeighborRange, SelfLoop, Asymmetric, DuplicateNeighbor, Unsorted };

struct Violation {
  ViolationKind kind;
  Vertex u = 0;
  Vertex v = 0;
  std::string message;
};

/// Every violated invariant with a witness; empty when the graph is valid.
inline std::vector<Violation> validate(const LabeledGraph& g) {
  std::vector<Violation> out;
  if (g.adjacency.size() != g.color.size()) {
    out.push_back({ViolationKind::SizeMismatch, 0, 0,
                   "adjacency has " + std::to_string(g.adjacency.size()) + " lists for " +
                       std::to_string(g.color.size()) + " vertices"});
    return out;
  }
  const auto n = static_cast<Vertex>(g.size());
  for (Vertex v = 0; v < n; ++v) {
    if (g.color[v] < 1 || g.color[v] > g.num_colors)
      out.push_back({ViolationKind::ColorRange, v, v,
                     "vertex " + std::to_string(v) + " has color " + std::to_string(g.color[v]) + " outside [1," +
                         std::to_string(g.num_colors) + "]"});
    const auto& nb = g.adjacency[v];
    for (size_t i = 0; i < nb.size(); ++i) {
      Vertex w = nb[i];
      if (w >= n) {
        out.push_back({ViolationKind::NeighborRange, v, w, "neighbor id out of range"});
        continue;
      }
      if (w == v) out.push_back({ViolationKind::SelfLoop, v, v, "self loop at " + std::to_string(v)});
      if (i > 0 && nb[i - 1] == w) out.push_back({ViolationKind::DuplicateNeighbor, v, w, "duplicate neighbor"});
      if (i > 0 && nb[i - 1] > w) out.push_back({ViolationKind::Unsorted, v, w, "neighbor list not sorted"});
      const auto& back = g.adjacency[w];
      if (std::find(back.begin(), back.end(), v) == back.end())
        out.push_back({ViolationKind::Asymmetric, v, w,
                       std::to_string(w) + " in N(" + std::to_string(v) + ") but not conversely"});
    }
  }
  return out;
}

/// Builds a graph from an edge list; throws std::invalid_argument on loops,
/// duplicates, out-of-range ids or colors.
inline LabeledGraph make_graph(uint32_t num_colors, std::vector<uint32_t> colors,
                               const std::vector<std::pair<Vertex, Vertex>>& edges) {
  LabeledGraph g;
  g.num_colors = num_colors;
  g.color = std::move(colors);
  g.adjacency.assign(g.color.size(), {});
  for (auto [u, v] : edges) {
    if (u >= g.size() || v >= g.size()) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("loop edge at " + std::to_string(u));
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  auto problems = validate(g);
  if (!problems.empty()) throw std::invalid_argument(problems.front().message);
  return g;
}

/// Same graph viewed with `num_colors` available colors.
inline LabeledGraph with_num_colors(LabeledGraph g, uint32_t num_colors) {
  g.num_colors = num_colors;
  return g;
}

/// T[k_1..k_m]: root 0, children 1..m, child j+1 gets k_j fresh leaves,
/// leaves numbered in index order. Unicolored.
inline LabeledGraph gen_tree(const std::vector<uint32_t>& k) {
  if (k.empty()) throw std::invalid_argument("gen_tree needs m >= 1");
  const auto m = static_cast<Vertex>(k.size());
  size_t n = 1 + m;
  for (auto kj : k) n += kj;
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(n - 1);
  for (Vertex j = 1; j <= m; ++j) edges.emplace_back(0, j);
  Vertex next = m + 1;
  for (Vertex j = 1; j <= m; ++j)
    for (uint32_t l = 0; l < k[j - 1]; ++l) edges.emplace_back(j, next++);
  return make_graph(1, std::vector<uint32_t>(n, 1), edges);
}

/// Erdos-Renyi G(n, p) with colors uniform in [1, num_colors].
inline LabeledGraph gen_random(uint32_t n, uint32_t num_colors, double p, uint64_t seed) {
  if (n < 1 || num_colors < 1) throw std::invalid_argument("gen_random needs n >= 1 and colors >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> pick_color(1, num_colors);
  std::vector<uint32_t> colors(n);
  for (auto& c : colors) c = pick_color(rng);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return make_graph(num_colors, std::move(colors), edges);
}

/// Vertices of `b` are shifted by a.size().
inline LabeledGraph disjoint_union(const LabeledGraph& a, const LabeledGraph& b) {
  LabeledGraph g;
  g.num_colors = std::max(a.num_colors, b.num_colors);
  g.color = a.color;
  g.color.insert(g.color.end(), b.color.begin(), b.color.end());
  g.adjacency = a.adjacency;
  const auto off = static_cast<Vertex>(a.size());
  for (const auto& nb : b.adjacency) {
    std::vector<Vertex> shifted(nb);
    for (auto& w : shifted) w += off;
    g.adjacency.push_back(std::move(shifted));
  }
  return g;
}

/// perm[v] is the new id of vertex v.
inline LabeledGraph relabel(const LabeledGraph& g, const std::vector<Vertex>& perm) {
  std::vector<uint32_t> colors(g.size());
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v < g.size(); ++v) colors[perm[v]] = g.color[v];
  for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
  return make_graph(g.num_colors, std::move(colors), edges);
}

class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(size_t line_no, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + reason), line(line_no) {}
  size_t line;
};

inline std::string save_graph(const LabeledGraph& g) {
  std::ostringstream os;
  os << "graph " << g.size() << ' ' << g.num_colors << '\n';
  for (Vertex v = 0; v < g.size(); ++v) os << "v " << v << ' ' << g.color[v] << '\n';
  for (auto [u, v] : g.edges()) os << "e " << u << ' ' << v << '\n';
  return os.str();
}

inline LabeledGraph load_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line_no = 0;
  bool have_header = false;
  uint32_t n = 0, num_colors = 0;
  std::vector<uint32_t> colors;
  std::vector<bool> seen;
  std::set<std::pair<Vertex, Vertex>> edge_set;
  std::vector<std::pair<Vertex, Vertex>> edges;

  auto parse_u32 = [&](std::istringstream& ls, const char* what) {
    long long v;
    if (!(ls >> v)) throw GraphFormatError(line_no, std::string("expected ") + what);
    if (v < 0 || v > 0xffffffffLL) throw GraphFormatError(line_no, std::string(what) + " out of range");
    return static_cast<uint32_t>(v);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "graph") {
      if (have_header) throw GraphFormatError(line_no, "duplicate header");
      n = parse_u32(ls, "vertex count");
      num_colors = parse_u32(ls, "color count");
      if (n < 1) throw GraphFormatError(line_no, "graph needs at least one vertex");
      if (num_colors < 1) throw GraphFormatError(line_no, "graph needs at least one color");
      colors.assign(n, 0);
      seen.assign(n, false);
      have_header = true;
    } else if (!have_header) {
      throw GraphFormatError(line_no, "expected 'graph <n> <colors>' header");
    } else if (tag == "v") {
      Vertex v = parse_u32(ls, "vertex id");
      uint32_t c = parse_u32(ls, "color");
      if (v >= n) throw GraphFormatError(line_no, "vertex id " + std::to_string(v) + " out of range");
      if (seen[v]) throw GraphFormatError(line_no, "vertex " + std::to_string(v) + " declared twice");
      if (c < 1 || c > num_colors)
        throw GraphFormatError(line_no, "color " + std::to_string(c) + " outside [1," + std::to_string(num_colors) + "]");
      colors[v] = c;
      seen[v] = true;
    } else if (tag == "e") {
      Vertex u = parse_u32(ls, "edge endpoint");
      Vertex v = parse_u32(ls, "edge endpoint");
      if (u >= n || v >= n) throw GraphFormatError(line_no, "edge endpoint out of range");
      if (u == v) throw GraphFormatError(line_no, "loop edge at vertex " + std::to_string(u));
      auto key = std::minmax(u, v);
      if (!edge_set.insert(key).second) throw GraphFormatError(line_no, "duplicate edge");
      edges.emplace_back(u, v);
    } else {
      throw GraphFormatError(line_no, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) throw GraphFormatError(line_no, "trailing token '" + extra + "'");
  }
  if (!have_header) throw GraphFormatError(line_no, "missing 'graph' header");
  for (Vertex v = 0; v < n; ++v)
    if (!seen[v]) throw GraphFormatError(line_no, "vertex " + std::to_string(v) + " has no 'v' line");
  return make_graph(num_colors, std::move(colors), edges);
}

}  // namespace gc2gnn
