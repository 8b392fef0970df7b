#pragma once

// Exact arithmetic substrate: rationals, univariate and multivariate
// polynomials, rational functions, and exact linear solving.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gc2gnn {

class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arbitrary-precision rational in canonical form (den > 0, gcd 1).
class Rat {
 public:
  Rat() = default;
  Rat(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rat(long num, long den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rat(const mpz_class& z) : v_(z) {}
  explicit Rat(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

  /// Accepts "p", "-p", "p/q". Throws std::invalid_argument on malformed
  /// text and std::domain_error on a zero denominator.
  static Rat parse(std::string_view text) {
    auto digits = [](std::string_view s, bool allow_sign) {
      if (s.empty()) return false;
      size_t i = 0;
      if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
      if (i == s.size()) return false;
      for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
      return true;
    };
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    std::string n(num);
    if (!n.empty() && n[0] == '+') n.erase(0, 1);
    mpz_class zn(n, 10), zd(std::string(den), 10);
    if (zd == 0) throw std::domain_error("rational '" + std::string(text) + "' has zero denominator");
    return Rat(mpq_class(zn, zd));
  }

  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  double to_double() const { return v_.get_d(); }
  const mpq_class& raw() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  Rat operator-() const { return Rat(mpq_class(-v_)); }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  mpq_class v_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

/// Conversion from exact weights into the scalar type an engine runs in.
template <class Scalar>
Scalar scalar_from(const Rat& r);
template <>
inline Rat scalar_from<Rat>(const Rat& r) { return r; }
template <>
inline double scalar_from<double>(const Rat& r) { return r.to_double(); }

inline bool is_zero_scalar(const Rat& r) { return r.is_zero(); }
inline bool is_zero_scalar(double d) { return d == 0.0; }

/// Univariate polynomial, coefficients lowest degree first, no trailing zeros.
class Poly {
 public:
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  Poly() = default;
  explicit Poly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<Rat> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(const Rat& c) { return Poly(std::vector<Rat>{c}); }
  static Poly x() { return Poly({Rat(0), Rat(1)}); }
  static Poly monomial(const Rat& c, size_t k) {
    std::vector<Rat> v(k + 1, Rat(0));
    v[k] = c;
    return Poly(std::move(v));
  }
  /// X (X-1) ... (X-(k-1)); the constant 1 when k = 0.
  static Poly falling_factorial(unsigned k) {
    Poly p = constant(Rat(1));
    for (unsigned i = 0; i < k; ++i) p = p * Poly({Rat(-static_cast<long>(i)), Rat(1)});
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return c_.empty() ? kZeroDegree : static_cast<int>(c_.size()) - 1; }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }
  const Rat& leading() const {
    if (c_.empty()) throw std::logic_error("leading coefficient of the zero polynomial");
    return c_.back();
  }

  template <class S>
  S eval(const S& x) const {
    S acc = scalar_from<S>(Rat(0));
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + scalar_from<S>(*it);
    return acc;
  }

  Poly derivative() const {
    std::vector<Rat> d;
    for (size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rat(static_cast<long>(k)));
    return Poly(std::move(d));
  }

  /// p(q(X)).
  Poly compose(const Poly& q) const {
    Poly acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + constant(*it);
    return acc;
  }

  /// Euclidean division: *this = quot * d + rem, deg rem < deg d.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rat> rem = c_;
    int dd = d.degree();
    std::vector<Rat> quot(std::max(0, degree() - dd + 1), Rat(0));
    for (int k = degree(); k >= dd; --k) {
      if (rem[k].is_zero()) continue;
      Rat f = rem[k] / d.leading();
      quot[k - dd] = f;
      for (int j = 0; j <= dd; ++j) rem[k - dd + j] -= f * d.c_[j];
    }
    return {Poly(std::move(quot)), Poly(std::move(rem))};
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + b * constant(Rat(-1)); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rat> r(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(r));
  }
  friend bool operator==(const Poly&, const Poly&) = default;

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    for (const auto& c : c_) out.push_back(c.str());
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rat> c_;
};

/// Number of distinct real roots of p, by Sturm's theorem.
inline size_t count_real_roots(const Poly& p) {
  if (p.is_zero()) throw std::domain_error("count_real_roots of the zero polynomial");
  if (p.degree() == 0) return 0;
  std::vector<Poly> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    Poly r = chain[chain.size() - 2].divmod(chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(Poly::constant(Rat(-1)) * r);
  }
  auto variations = [&](bool at_neg_inf) {
    int changes = 0, prev = 0;
    for (const auto& q : chain) {
      int s = q.leading().sign();
      if (at_neg_inf && q.degree() % 2 == 1) s = -s;
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
    return changes;
  };
  return static_cast<size_t>(variations(true) - variations(false));
}

/// P/Q with Q not identically zero. Degree is the pair (deg P, deg Q).
class RationalFn {
 public:
  RationalFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  std::pair<int, int> degree() const {
    return {num_.is_zero() ? 0 : num_.degree(), den_.degree()};
  }
  bool has_no_real_pole() const { return count_real_roots(den_) == 0; }

  template <class S>
  S eval(const S& x) const {
    S d = den_.eval(x);
    if (is_zero_scalar(d)) throw PoleError("rational activation evaluated at a pole");
    return num_.eval(x) / d;
  }

  friend bool operator==(const RationalFn&, const RationalFn&) = default;

 private:
  Poly num_, den_;
};

/// Sparse multivariate polynomial over Rat.
class MultiPoly {
 public:
  using Exponent = std::vector<unsigned>;

  explicit MultiPoly(size_t arity) : arity_(arity) {}

  size_t arity() const { return arity_; }
  const std::map<Exponent, Rat>& terms() const { return terms_; }

  MultiPoly& add_term(Exponent e, const Rat& c) {
    if (e.size() != arity_) throw std::invalid_argument("MultiPoly: exponent arity mismatch");
    Rat& slot = terms_[e];
    slot += c;
    if (slot.is_zero()) terms_.erase(e);
    return *this;
  }

  int total_degree() const {
    if (terms_.empty()) return Poly::kZeroDegree;
    int best = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (unsigned a : e) s += static_cast<int>(a);
      best = std::max(best, s);
    }
    return best;
  }

  Rat eval(std::span<const Rat> x) const {
    if (x.size() != arity_) throw std::invalid_argument("MultiPoly: evaluation arity mismatch");
    Rat acc(0);
    for (const auto& [e, c] : terms_) {
      Rat term = c;
      for (size_t i = 0; i < arity_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) term *= x[i];
      acc += term;
    }
    return acc;
  }

  /// Invariant under every permutation of the variables (adjacent
  /// transpositions generate the symmetric group).
  bool is_symmetric() const {
    for (size_t i = 0; i + 1 < arity_; ++i) {
      for (const auto& [e, c] : terms_) {
        Exponent swapped = e;
        std::swap(swapped[i], swapped[i + 1]);
        auto it = terms_.find(swapped);
        if (it == terms_.end() || it->second != c) return false;
      }
    }
    return true;
  }

 private:
  size_t arity_;
  std::map<Exponent, Rat> terms_;
};

/// Row-major dense matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, const T& fill = T()) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(size_t n) {
    Matrix m(n, n, T(0));
    for (size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  T& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  std::span<const T> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RatMatrix = Matrix<Rat>;

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::vector<size_t> dependent)
      : std::runtime_error(describe(dependent)), dependent_columns(std::move(dependent)) {}
  std::vector<size_t> dependent_columns;

 private:
  static std::string describe(const std::vector<size_t>& cols) {
    std::string s = "singular matrix; dependent columns:";
    for (size_t c : cols) s += " " + std::to_string(c);
    return s;
  }
};

namespace detail {

// Gauss-Jordan elimination in place; returns pivot column per pivot row.
inline std::vector<size_t> reduce_rows(RatMatrix& m) {
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (size_t k = 0; k < m.cols(); ++k) std::swap(m(p, k), m(r, k));
    Rat inv = Rat(1) / m(r, c);
    for (size_t k = c; k < m.cols(); ++k) m(r, k) *= inv;
    for (size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      Rat f = m(i, c);
      for (size_t k = c; k < m.cols(); ++k) m(i, k) -= f * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

/// Columns of m that are linearly independent of all earlier columns.
inline std::vector<size_t> independent_columns(RatMatrix m) { return detail::reduce_rows(m); }

/// Solves M x = b exactly. Throws SingularMatrixError naming the columns
/// that do not carry a pivot.
inline std::vector<Rat> solve_linear_exact(const RatMatrix& M, std::span<const Rat> b) {
  const size_t n = M.rows();
  if (M.cols() != n) throw std::invalid_argument("solve_linear_exact: matrix is not square");
  if (b.size() != n) throw std::invalid_argument("solve_linear_exact: right-hand side size mismatch");
  RatMatrix aug(n, n + 1);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) aug(i, j) = M(i, j);
    aug(i, n) = b[i];
  }
  RatMatrix coeff_only(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) coeff_only(i, j) = M(i, j);
  auto pivots = independent_columns(coeff_only);
  if (pivots.size() < n) {
    std::vector<size_t> dependent;
    for (size_t c = 0, p = 0; c < n; ++c) {
      if (p < pivots.size() && pivots[p] == c) ++p;
      else dependent.push_back(c);
    }
    throw SingularMatrixError(std::move(dependent));
  }
  detail::reduce_rows(aug);
  std::vector<Rat> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

}  // namespace gc2gnn
