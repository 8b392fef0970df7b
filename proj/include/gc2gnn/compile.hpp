#pragma once

// Logic-to-weights compilers and the polynomial-network constructor.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "gc2gnn/formula.hpp"
#include "gc2gnn/gnn.hpp"
#include "gc2gnn/model_io.hpp"
#include "gc2gnn/numeric.hpp"
#include "gc2gnn/parser.hpp"

namespace gc2gnn {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_compilable(const Formula& f, uint32_t num_colors) {
  if (!is_desugared(f)) throw CompileError("formula contains 'or' or 'true'; desugar it first");
  if (max_color(f) > num_colors)
    throw CompileError("formula uses col(" + std::to_string(max_color(f)) + ") but only " +
                       std::to_string(num_colors) + " colors are available");
}

inline Matrix<int> color_init(const SubformulaList& subs, uint32_t num_colors) {
  Matrix<int> init(subs.size(), num_colors, 0);
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i].kind() == NodeKind::Color) init(i, subs[i].value() - 1) = 1;
  return init;
}

}  // namespace detail

/// Recurrent clipped-ReLU model with one coordinate per subformula. After
/// iteration t every coordinate whose subformula has depth <= t+1 holds that
/// subformula's truth value exactly; T = number of subformulas.
inline GnnModel compile_gc2_relu(const Formula& f, uint32_t num_colors) {
  detail::check_compilable(f, num_colors);
  const auto subs = subformulas(f);
  const size_t d = subs.size();
  GnnLayer L = GnnLayer::zeros(d, Activation::clipped_relu());
  for (size_t i = 0; i < d; ++i) {
    auto [j, k] = subs.children(i);
    switch (subs[i].kind()) {
      case NodeKind::Color:
        L.A(i, i) = Rat(1);
        break;
      case NodeKind::And:
        L.A(i, j) += Rat(1);
        L.A(i, k) += Rat(1);
        L.c[i] = Rat(-1);
        break;
      case NodeKind::Not:
        L.A(i, j) = Rat(-1);
        L.c[i] = Rat(1);
        break;
      case NodeKind::ExistsGeq:
        L.B(i, j) = Rat(1);
        L.c[i] = Rat(1) - Rat(static_cast<long>(subs[i].value()));
        break;
      default:
        throw CompileError("unexpected node kind");
    }
  }
  GnnModel m;
  m.num_colors = num_colors;
  m.state_dim = d;
  m.iterations = d;
  m.init = detail::color_init(subs, num_colors);
  m.recurrent = true;
  m.layers = {std::move(L)};
  m.output_coord = d - 1;
  m.decision = {Rat(1), Rat(0)};
  return m;
}

/// Recurrent polynomial model for an RGC2 query. Non-negated queries output
/// 0 when false and >= 1 when true; negated ones output exactly 1 when true
/// and <= 0 when false.
inline GnnModel compile_rgc2_poly(const Formula& f, uint32_t num_colors) {
  detail::check_compilable(f, num_colors);
  if (auto bad = rgc2_violation(f))
    throw CompileError("formula is not in RGC2; offending subterm: " + render(*bad));
  const auto subs = subformulas(f);
  const size_t d = subs.size();
  GnnLayer L = GnnLayer::zeros(d, Activation::identity());
  for (size_t i = 0; i < d; ++i) {
    const int j = subs.children(i).first;
    switch (subs[i].kind()) {
      case NodeKind::Color:
        L.A(i, i) = Rat(1);
        break;
      case NodeKind::Not:
        L.A(i, j) = Rat(-1);
        L.c[i] = Rat(1);
        break;
      case NodeKind::ExistsGeq:
        L.B(i, j) = Rat(1);
        // K > 1 only occurs directly above a color atom, whose neighbor sum
        // is an exact count.
        if (subs[i].value() > 1) L.activations[i] = Activation::polynomial(Poly::falling_factorial(subs[i].value()));
        break;
      default:
        throw CompileError("unexpected node kind in RGC2 formula");
    }
  }
  GnnModel m;
  m.num_colors = num_colors;
  m.state_dim = d;
  m.iterations = d;
  m.init = detail::color_init(subs, num_colors);
  m.recurrent = true;
  m.layers = {std::move(L)};
  m.output_coord = d - 1;
  m.decision = {Rat(1), Rat(0)};
  return m;
}

/// Feedforward network x -> out_w . h_L + out_b with
/// h_l = sigma(W_l h_{l-1} + b_l) coordinate-wise and h_0 = (x).
struct PolyNetwork {
  struct Layer {
    RatMatrix W;
    std::vector<Rat> b;
  };
  Poly sigma;
  std::vector<Layer> hidden;
  std::vector<Rat> out_w;
  Rat out_b;

  size_t depth() const { return hidden.size(); }

  template <class S>
  S eval(const S& x) const {
    std::vector<S> h{x};
    for (const auto& L : hidden) {
      std::vector<S> next(L.W.rows());
      for (size_t i = 0; i < L.W.rows(); ++i) {
        S z = scalar_from<S>(L.b[i]);
        for (size_t j = 0; j < L.W.cols(); ++j) z += scalar_from<S>(L.W(i, j)) * h[j];
        next[i] = sigma.eval(z);
      }
      h = std::move(next);
    }
    S out = scalar_from<S>(out_b);
    for (size_t i = 0; i < h.size(); ++i) out += scalar_from<S>(out_w[i]) * h[i];
    return out;
  }

  /// The network's function as an explicit polynomial.
  Poly as_polynomial() const {
    std::vector<Poly> h{Poly::x()};
    for (const auto& L : hidden) {
      std::vector<Poly> next;
      for (size_t i = 0; i < L.W.rows(); ++i) {
        Poly z = Poly::constant(L.b[i]);
        for (size_t j = 0; j < L.W.cols(); ++j) z = z + Poly::constant(L.W(i, j)) * h[j];
        next.push_back(sigma.compose(z));
      }
      h = std::move(next);
    }
    Poly out = Poly::constant(out_b);
    for (size_t i = 0; i < h.size(); ++i) out = out + Poly::constant(out_w[i]) * h[i];
    return out;
  }
};

class RealizeError : public std::runtime_error {
 public:
  RealizeError(const std::string& msg, std::vector<long> shifts) : std::runtime_error(msg), shift_set(std::move(shifts)) {}
  std::vector<long> shift_set;
};

namespace detail {

// Affine map from the previous layer's units to a polynomial in x.
struct Signal {
  std::vector<Rat> w;
  Rat b;
};

inline Signal combine(const Signal& s, const Signal* t, const Rat& c, const Rat& shift) {
  Signal out = s;
  out.b += shift;
  if (t) {
    for (size_t i = 0; i < out.w.size(); ++i) out.w[i] += c * t->w[i];
    out.b += c * t->b;
  }
  return out;
}

}  // namespace detail

/// A network with activation sigma (deg m >= 2) computing `target` exactly.
/// Hidden layer l spans all polynomials of degree <= m^l: candidate units
/// sigma(x^a + c x^(a+1) + s) over signals x^a of the previous level, reduced
/// to a basis by exact elimination. Depth is ceil(log_m deg target) (at
/// least 1) and widths depend only on that degree.
inline PolyNetwork realize_polynomial(const Poly& sigma, const Poly& target) {
  const int m = sigma.degree();
  if (m < 2) throw RealizeError("activation must have degree >= 2", {});
  PolyNetwork net;
  net.sigma = sigma;
  if (target == sigma) {
    net.hidden.push_back({RatMatrix(1, 1, Rat(1)), {Rat(0)}});
    net.out_w = {Rat(1)};
    net.out_b = Rat(0);
    return net;
  }
  const int M = std::max(0, target.degree());

  // Signals x^1..x^D as affine maps of the previous units; level 0 is the input.
  std::vector<detail::Signal> signals{{{Rat(1)}, Rat(0)}};
  size_t D = 1;
  for (;;) {
    const size_t span_deg = D * static_cast<size_t>(m);
    std::vector<long> shifts;
    for (long s = 1; s <= m; ++s) shifts.push_back(s);

    std::vector<detail::Signal> chosen;
    std::vector<Poly> chosen_poly;
    for (;;) {
      // Column 0 is the constant 1 (the output bias).
      std::vector<detail::Signal> cand;
      std::vector<Poly> cand_poly;
      for (size_t a = 1; a <= D; ++a) {
        for (long c = 0; c <= m; ++c) {
          if (c > 0 && a + 1 > D) break;
          for (long s : shifts) {
            const detail::Signal* next = c > 0 ? &signals[a] : nullptr;
            cand.push_back(detail::combine(signals[a - 1], next, Rat(c), Rat(s)));
            Poly z = Poly::monomial(Rat(1), a) + Poly::monomial(Rat(c), a + 1) + Poly::constant(Rat(s));
            cand_poly.push_back(sigma.compose(z));
          }
        }
      }
      RatMatrix coeffs(span_deg + 1, cand.size() + 1, Rat(0));
      coeffs(0, 0) = Rat(1);
      for (size_t k = 0; k < cand.size(); ++k)
        for (size_t e = 0; e <= span_deg; ++e) coeffs(e, k + 1) = cand_poly[k].coeff(e);
      auto pivots = independent_columns(coeffs);
      if (pivots.size() == span_deg + 1 && pivots.front() == 0) {
        for (size_t p = 1; p < pivots.size(); ++p) {
          chosen.push_back(cand[pivots[p] - 1]);
          chosen_poly.push_back(cand_poly[pivots[p] - 1]);
        }
        break;
      }
      if (shifts.size() >= static_cast<size_t>(4 * m))
        throw RealizeError("shifted activations do not span the polynomials of degree <= " + std::to_string(span_deg),
                           shifts);
      shifts.push_back(shifts.back() + 1);
    }

    PolyNetwork::Layer layer{RatMatrix(chosen.size(), signals.front().w.size()), {}};
    for (size_t i = 0; i < chosen.size(); ++i) {
      for (size_t j = 0; j < chosen[i].w.size(); ++j) layer.W(i, j) = chosen[i].w[j];
      layer.b.push_back(chosen[i].b);
    }
    net.hidden.push_back(std::move(layer));

    // Basis matrix: column 0 constant, then the chosen units.
    const size_t n = span_deg + 1;
    RatMatrix basis(n, n, Rat(0));
    basis(0, 0) = Rat(1);
    for (size_t k = 0; k < chosen_poly.size(); ++k)
      for (size_t e = 0; e < n; ++e) basis(e, k + 1) = chosen_poly[k].coeff(e);
    auto express = [&](const Poly& p) {
      std::vector<Rat> rhs(n);
      for (size_t e = 0; e < n; ++e) rhs[e] = p.coeff(e);
      auto x = solve_linear_exact(basis, rhs);
      return detail::Signal{std::vector<Rat>(x.begin() + 1, x.end()), x[0]};
    };

    if (span_deg >= static_cast<size_t>(M)) {
      auto out = express(target);
      net.out_w = std::move(out.w);
      net.out_b = out.b;
      return net;
    }
    std::vector<detail::Signal> next;
    for (size_t a = 1; a <= span_deg; ++a) next.push_back(express(Poly::monomial(Rat(1), a)));
    signals = std::move(next);
    D = span_deg;
  }
}

struct PolyCertificate {
  bool ok = true;
  std::vector<Rat> points;
  bool identity_holds = true;
};

/// Exact agreement at 2*deg+1 distinct integers (deg bounding both sides)
/// plus symbolic identity.
inline PolyCertificate certify(const PolyNetwork& net, const Poly& target) {
  PolyCertificate cert;
  const Poly realized = net.as_polynomial();
  const int deg = std::max({0, target.degree(), realized.degree()});
  for (long x = -deg; x <= deg; ++x) {
    cert.points.push_back(Rat(x));
    if (net.eval(Rat(x)) != target.eval(Rat(x))) cert.ok = false;
  }
  cert.identity_holds = realized == target;
  cert.ok = cert.ok && cert.identity_holds;
  return cert;
}

inline Json network_to_json(const PolyNetwork& net) {
  Json j;
  j["sigma"] = poly_to_json(net.sigma);
  Json layers = Json::array();
  for (const auto& L : net.hidden) layers.push_back({{"W", detail::matrix_to_json(L.W)}, {"b", detail::rat_array(L.b)}});
  j["hidden"] = std::move(layers);
  j["out_w"] = detail::rat_array(net.out_w);
  j["out_b"] = net.out_b.str();
  return j;
}

}  // namespace gc2gnn
