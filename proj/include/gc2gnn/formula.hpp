#pragma once

// GC2 formulas in modal form. Variables are implicit: ExistsGeq(N, phi) at a
// vertex x counts neighbors y of x satisfying phi.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace gc2gnn {

enum class NodeKind { Color, Top, Not, And, Or, ExistsGeq };

class Formula {
 public:
  static Formula color(uint32_t i) {
    if (i == 0) throw std::invalid_argument("color index must be >= 1");
    return Formula(std::make_shared<const Node>(Node{NodeKind::Color, i, {}, {}}));
  }
  /// Always-true sugar; desugar() expands it.
  static Formula top() { return Formula(std::make_shared<const Node>(Node{NodeKind::Top, 0, {}, {}})); }
  static Formula negate(Formula f) { return Formula(std::make_shared<const Node>(Node{NodeKind::Not, 0, f.node_, {}})); }
  static Formula conj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{NodeKind::And, 0, a.node_, b.node_}));
  }
  static Formula disj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{NodeKind::Or, 0, a.node_, b.node_}));
  }
  static Formula exists_geq(uint32_t n, Formula f) {
    if (n == 0) throw std::invalid_argument("counting quantifier needs N >= 1");
    return Formula(std::make_shared<const Node>(Node{NodeKind::ExistsGeq, n, f.node_, {}}));
  }

  NodeKind kind() const { return node_->kind; }
  /// Color index for Color nodes, N for ExistsGeq nodes.
  uint32_t value() const { return node_->value; }
  Formula child() const { return Formula(node_->lhs); }
  Formula left() const { return Formula(node_->lhs); }
  Formula right() const { return Formula(node_->rhs); }
  size_t arity() const {
    switch (kind()) {
      case NodeKind::Color:
      case NodeKind::Top: return 0;
      case NodeKind::Not:
      case NodeKind::ExistsGeq: return 1;
      default: return 2;
    }
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.value() != b.value()) return false;
    if (a.arity() >= 1 && !(a.left() == b.left())) return false;
    if (a.arity() == 2 && !(a.right() == b.right())) return false;
    return true;
  }

  size_t node_count() const {
    size_t n = 1;
    if (arity() >= 1) n += left().node_count();
    if (arity() == 2) n += right().node_count();
    return n;
  }

 private:
  struct Node {
    NodeKind kind;
    uint32_t value;
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline unsigned depth(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Color:
    case NodeKind::Top: return 1;
    case NodeKind::Not:
    case NodeKind::ExistsGeq: return 1 + depth(f.child());
    default: return 1 + std::max(depth(f.left()), depth(f.right()));
  }
}

inline uint32_t max_color(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Color: return f.value();
    case NodeKind::Top: return 1;
    case NodeKind::Not:
    case NodeKind::ExistsGeq: return max_color(f.child());
    default: return std::max(max_color(f.left()), max_color(f.right()));
  }
}

inline bool is_desugared(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Top:
    case NodeKind::Or: return false;
    case NodeKind::Color: return true;
    case NodeKind::Not:
    case NodeKind::ExistsGeq: return is_desugared(f.child());
    default: return is_desugared(f.left()) && is_desugared(f.right());
  }
}

/// Rewrites Or(a,b) to Not(And(Not a, Not b)) and Top to the desugared form
/// of Or(col(1), not col(1)). Identity on the core fragment.
inline Formula desugar(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Color: return f;
    case NodeKind::Top: return desugar(Formula::disj(Formula::color(1), Formula::negate(Formula::color(1))));
    case NodeKind::Not: {
      Formula c = desugar(f.child());
      return c == f.child() ? f : Formula::negate(c);
    }
    case NodeKind::ExistsGeq: {
      Formula c = desugar(f.child());
      return c == f.child() ? f : Formula::exists_geq(f.value(), c);
    }
    case NodeKind::And: {
      Formula l = desugar(f.left()), r = desugar(f.right());
      return (l == f.left() && r == f.right()) ? f : Formula::conj(l, r);
    }
    case NodeKind::Or:
      return Formula::negate(
          Formula::conj(Formula::negate(desugar(f.left())), Formula::negate(desugar(f.right()))));
  }
  throw std::logic_error("unreachable");
}

/// Structurally distinct subformulas in post-order, first occurrence wins.
/// Children precede parents; the root is last.
class SubformulaList {
 public:
  static constexpr int kNone = -1;

  size_t size() const { return items_.size(); }
  const Formula& operator[](size_t i) const { return items_[i]; }
  const std::vector<Formula>& items() const { return items_; }
  /// Child positions of entry i (kNone where absent).
  std::pair<int, int> children(size_t i) const { return children_[i]; }
  std::optional<size_t> index_of(const Formula& f) const {
    for (size_t i = 0; i < items_.size(); ++i)
      if (items_[i] == f) return i;
    return std::nullopt;
  }

  /// Enumeration over any node kinds, including Or and Top.
  static SubformulaList enumerate(const Formula& f) {
    SubformulaList out;
    std::map<std::tuple<int, uint32_t, int, int>, int> interned;
    out.visit(f, interned);
    return out;
  }

 private:
  int visit(const Formula& f, std::map<std::tuple<int, uint32_t, int, int>, int>& interned) {
    int l = kNone, r = kNone;
    if (f.arity() >= 1) l = visit(f.left(), interned);
    if (f.arity() == 2) r = visit(f.right(), interned);
    auto key = std::make_tuple(static_cast<int>(f.kind()), f.value(), l, r);
    auto [it, fresh] = interned.emplace(key, static_cast<int>(items_.size()));
    if (fresh) {
      items_.push_back(f);
      children_.emplace_back(l, r);
    }
    return it->second;
  }

  std::vector<Formula> items_;
  std::vector<std::pair<int, int>> children_;
};

inline SubformulaList subformulas(const Formula& f) {
  if (!is_desugared(f)) throw std::invalid_argument("subformulas: formula contains 'or' or 'true'; desugar first");
  return SubformulaList::enumerate(f);
}

enum class RgcClass { Omega0, OmegaPlus, OmegaNegated, NotRGC2 };

inline const char* to_string(RgcClass c) {
  switch (c) {
    case RgcClass::Omega0: return "Omega0";
    case RgcClass::OmegaPlus: return "OmegaPlus";
    case RgcClass::OmegaNegated: return "OmegaNegated";
    case RgcClass::NotRGC2: return "NotRGC2";
  }
  return "?";
}

inline bool is_omega0(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Color: return true;
    case NodeKind::Not:
    case NodeKind::ExistsGeq: return f.child().kind() == NodeKind::Color;
    default: return false;
  }
}

namespace detail {
inline bool is_positive_rgc2(const Formula& f) {
  if (is_omega0(f)) return true;
  return f.kind() == NodeKind::ExistsGeq && f.value() == 1 && is_positive_rgc2(f.child());
}
}  // namespace detail

inline RgcClass rgc2_classify(const Formula& f) {
  if (is_omega0(f)) return RgcClass::Omega0;
  if (detail::is_positive_rgc2(f)) return RgcClass::OmegaPlus;
  if (f.kind() == NodeKind::Not && detail::is_positive_rgc2(f.child())) return RgcClass::OmegaNegated;
  return RgcClass::NotRGC2;
}

/// Innermost-first subterm that breaks the RGC2 shape, or nullopt when f is
/// in RGC2.
inline std::optional<Formula> rgc2_violation(const Formula& f) {
  if (rgc2_classify(f) != RgcClass::NotRGC2) return std::nullopt;
  Formula cur = f.kind() == NodeKind::Not ? f.child() : f;
  while (!is_omega0(cur)) {
    if (cur.kind() != NodeKind::ExistsGeq || cur.value() != 1) return cur;
    cur = cur.child();
  }
  return f;
}

}  // namespace gc2gnn
