#pragma once

// Aggregate-combine GNNs with sum aggregation:
//
//   xi^0(v)   = init * onehot(color(v))
//   xi^t+1(v) = act( A xi^t(v) + B sum_{w in N(v)} xi^t(w) + c )
//
// with one activation per output coordinate. Runs in exact (Rat) or float
// (double) arithmetic.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gc2gnn/graph.hpp"
#include "gc2gnn/numeric.hpp"
#include "gc2gnn/parallel.hpp"

namespace gc2gnn {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ActivationKind { Relu, ClippedRelu, Identity, Polynomial, Rational };

inline const char* to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Relu: return "relu";
    case ActivationKind::ClippedRelu: return "clipped_relu";
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Polynomial: return "polynomial";
    case ActivationKind::Rational: return "rational";
  }
  return "?";
}

class Activation {
 public:
  static Activation relu() { return Activation(ActivationKind::Relu); }
  static Activation clipped_relu() { return Activation(ActivationKind::ClippedRelu); }
  static Activation identity() { return Activation(ActivationKind::Identity); }
  static Activation polynomial(Poly p) {
    Activation a(ActivationKind::Polynomial);
    a.poly_ = std::move(p);
    return a;
  }
  /// Rejects denominators with a real root.
  static Activation rational(RationalFn r) {
    if (!r.has_no_real_pole()) throw ModelError("rational activation has a real pole");
    Activation a(ActivationKind::Rational);
    a.rational_ = std::move(r);
    return a;
  }

  ActivationKind kind() const { return kind_; }
  const Poly& poly() const { return poly_; }
  const RationalFn& rational_fn() const { return *rational_; }

  /// (numerator degree, denominator degree) for algebraic kinds.
  std::optional<std::pair<int, int>> algebraic_degree() const {
    switch (kind_) {
      case ActivationKind::Identity: return std::pair{1, 0};
      case ActivationKind::Polynomial: return std::pair{poly_.is_zero() ? 0 : poly_.degree(), 0};
      case ActivationKind::Rational: return rational_->degree();
      default: return std::nullopt;
    }
  }

  template <class S>
  S apply(const S& x) const {
    switch (kind_) {
      case ActivationKind::Identity: return x;
      case ActivationKind::Relu: return x < scalar_from<S>(Rat(0)) ? scalar_from<S>(Rat(0)) : x;
      case ActivationKind::ClippedRelu: {
        const S zero = scalar_from<S>(Rat(0)), one = scalar_from<S>(Rat(1));
        if (x < zero) return zero;
        if (one < x) return one;
        return x;
      }
      case ActivationKind::Polynomial: return poly_.eval(x);
      case ActivationKind::Rational: return rational_->eval(x);
    }
    throw std::logic_error("unreachable");
  }

  friend bool operator==(const Activation&, const Activation&) = default;

 private:
  explicit Activation(ActivationKind k) : kind_(k) {}
  ActivationKind kind_;
  Poly poly_;
  std::optional<RationalFn> rational_;
};

struct GnnLayer {
  RatMatrix A;  // self weights, d x d
  RatMatrix B;  // neighbor-sum weights, d x d
  std::vector<Rat> c;
  std::vector<Activation> activations;

  static GnnLayer zeros(size_t d, const Activation& act) {
    return {RatMatrix(d, d, Rat(0)), RatMatrix(d, d, Rat(0)), std::vector<Rat>(d, Rat(0)),
            std::vector<Activation>(d, act)};
  }
  friend bool operator==(const GnnLayer&, const GnnLayer&) = default;
};

/// Output o decides true iff o >= theta_plus, false iff o <= theta_minus.
struct DecisionRule {
  Rat theta_plus{1};
  Rat theta_minus{0};
  friend bool operator==(const DecisionRule&, const DecisionRule&) = default;
};

struct GnnModel {
  uint32_t num_colors = 1;
  size_t state_dim = 1;
  size_t iterations = 1;
  Matrix<int> init;  // state_dim x num_colors, entries 0/1
  bool recurrent = true;
  std::vector<GnnLayer> layers;  // one when recurrent, else `iterations`
  size_t output_coord = 0;
  DecisionRule decision;

  const GnnLayer& layer_at(size_t t) const { return recurrent ? layers.front() : layers.at(t); }
  friend bool operator==(const GnnModel&, const GnnModel&) = default;
};

/// Throws ModelError describing the first structural problem.
inline void validate_model(const GnnModel& m) {
  const size_t d = m.state_dim;
  if (d == 0) throw ModelError("state_dim must be >= 1");
  if (m.num_colors == 0) throw ModelError("num_colors must be >= 1");
  if (m.iterations == 0) throw ModelError("iterations must be >= 1");
  if (m.init.rows() != d || m.init.cols() != m.num_colors) throw ModelError("init must be state_dim x num_colors");
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < m.num_colors; ++j)
      if (m.init(i, j) != 0 && m.init(i, j) != 1) throw ModelError("init entries must be 0 or 1");
  if (m.recurrent ? m.layers.size() != 1 : m.layers.size() != m.iterations)
    throw ModelError(m.recurrent ? "recurrent model needs exactly one layer" : "layered model needs one layer per iteration");
  for (size_t t = 0; t < m.layers.size(); ++t) {
    const auto& L = m.layers[t];
    const std::string where = "layer " + std::to_string(t) + ": ";
    if (L.A.rows() != d || L.A.cols() != d) throw ModelError(where + "A must be state_dim x state_dim");
    if (L.B.rows() != d || L.B.cols() != d) throw ModelError(where + "B must be state_dim x state_dim");
    if (L.c.size() != d) throw ModelError(where + "c must have state_dim entries");
    if (L.activations.size() != d) throw ModelError(where + "activations must have state_dim entries");
  }
  if (m.output_coord >= d) throw ModelError("output_coord out of range");
  if (!(m.decision.theta_minus < m.decision.theta_plus)) throw ModelError("decision needs theta_minus < theta_plus");
}

/// A layer converted to the engine scalar with zero weights dropped.
template <class S>
class CompiledLayer {
 public:
  explicit CompiledLayer(const GnnLayer& L) : d_(L.c.size()), a_(d_), b_(d_), acts_(L.activations) {
    for (size_t i = 0; i < d_; ++i) {
      c_.push_back(scalar_from<S>(L.c[i]));
      for (size_t j = 0; j < d_; ++j) {
        if (!L.A(i, j).is_zero()) a_[i].emplace_back(j, scalar_from<S>(L.A(i, j)));
        if (!L.B(i, j).is_zero()) b_[i].emplace_back(j, scalar_from<S>(L.B(i, j)));
      }
    }
  }

  size_t dim() const { return d_; }

  void apply(std::span<const S> self, std::span<const S> nbsum, std::span<S> out) const {
    for (size_t i = 0; i < d_; ++i) {
      S z = c_[i];
      for (const auto& [j, w] : a_[i]) z += w * self[j];
      for (const auto& [j, w] : b_[i]) z += w * nbsum[j];
      out[i] = acts_[i].apply(z);
    }
  }

 private:
  size_t d_;
  std::vector<S> c_;
  std::vector<std::vector<std::pair<size_t, S>>> a_, b_;
  std::vector<Activation> acts_;
};

/// states[t][v] is xi^t(v), t = 0..T.
template <class S>
using Trace = std::vector<std::vector<std::vector<S>>>;

template <class S>
std::vector<S> initial_state(const GnnModel& m, uint32_t color) {
  std::vector<S> x(m.state_dim);
  for (size_t i = 0; i < m.state_dim; ++i) x[i] = scalar_from<S>(Rat(m.init(i, color - 1)));
  return x;
}

/// Full trace of the model on g. `iterations` overrides the model's T for
/// recurrent models.
template <class S>
Trace<S> run(const GnnModel& m, const LabeledGraph& g, unsigned workers = 1,
             std::optional<size_t> iterations = std::nullopt) {
  validate_model(m);
  if (g.num_colors != m.num_colors)
    throw ModelError("model expects " + std::to_string(m.num_colors) + " colors, graph has " +
                     std::to_string(g.num_colors));
  const size_t T = iterations.value_or(m.iterations);
  if (!m.recurrent && T > m.iterations) throw ModelError("layered model cannot run past its layer count");
  const size_t n = g.size(), d = m.state_dim;

  Trace<S> trace;
  trace.reserve(T + 1);
  trace.emplace_back();
  for (Vertex v = 0; v < n; ++v) trace[0].push_back(initial_state<S>(m, g.color[v]));

  std::vector<CompiledLayer<S>> compiled;
  for (const auto& L : m.layers) compiled.emplace_back(L);

  for (size_t t = 0; t < T; ++t) {
    const auto& prev = trace.back();
    const auto& layer = compiled[m.recurrent ? 0 : t];
    std::vector<std::vector<S>> next(n, std::vector<S>(d));
    parallel_for(n, workers, [&](size_t v) {
      std::vector<S> nbsum(d, scalar_from<S>(Rat(0)));
      for (Vertex w : g.neighbors(static_cast<Vertex>(v)))
        for (size_t i = 0; i < d; ++i) nbsum[i] += prev[w][i];
      layer.apply(prev[v], nbsum, next[v]);
    });
    trace.push_back(std::move(next));
  }
  return trace;
}

enum class Verdict { True, False, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

struct Decision {
  Verdict verdict;
  Rat value;
};

inline Decision apply_rule(const DecisionRule& rule, const Rat& o) {
  if (o >= rule.theta_plus) return {Verdict::True, o};
  if (o <= rule.theta_minus) return {Verdict::False, o};
  return {Verdict::Undecided, o};
}

/// Decisions for every vertex from a single exact run.
inline std::vector<Decision> decide_all(const GnnModel& m, const LabeledGraph& g, unsigned workers = 1) {
  auto trace = run<Rat>(m, g, workers);
  std::vector<Decision> out;
  for (const auto& state : trace.back()) out.push_back(apply_rule(m.decision, state[m.output_coord]));
  return out;
}

inline Decision decide(const GnnModel& m, const LabeledGraph& g, Vertex v) {
  if (v >= g.size()) throw std::out_of_range("vertex out of range");
  return decide_all(m, g)[v];
}

}  // namespace gc2gnn
