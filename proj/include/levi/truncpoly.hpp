#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/exact_linear.hpp"
#include "levi/monomial.hpp"
#include "levi/rational.hpp"

namespace levi {

/// Element of Q[x_1..x_n] / (degree > order). Terms are kept canonical:
/// grlex-sorted, no zero coefficients, no term of degree above `order`.
class TruncatedPolynomial {
 public:
  using TermMap = std::map<Exponents, Rational, GrlexLess>;

  TruncatedPolynomial(int num_vars, int order)
      : num_vars_(num_vars), order_(order) {
    require(num_vars >= 1, ErrorCode::InvalidInput, "need at least one variable");
    require(order >= 0, ErrorCode::InvalidInput, "negative truncation order");
  }

  static TruncatedPolynomial constant(int num_vars, int order, Rational c) {
    TruncatedPolynomial p(num_vars, order);
    p.add_term(Exponents(static_cast<std::size_t>(num_vars), 0), std::move(c));
    return p;
  }

  /// The monomial x_{var+1} (0-based var index).
  static TruncatedPolynomial variable(int num_vars, int order, int var) {
    require(var >= 0 && var < num_vars, ErrorCode::IndexOutOfRange,
            "variable index out of range");
    require(order >= 1, ErrorCode::InvalidInput,
            "order 0 ring has no variables");
    Exponents e(static_cast<std::size_t>(num_vars), 0);
    e[static_cast<std::size_t>(var)] = 1;
    TruncatedPolynomial p(num_vars, order);
    p.add_term(std::move(e), 1);
    return p;
  }

  static TruncatedPolynomial monomial(int num_vars, int order, Exponents e,
                                      Rational c) {
    require(static_cast<int>(e.size()) == num_vars, ErrorCode::DimensionMismatch,
            "exponent vector length mismatch");
    for (int x : e)
      require(x >= 0, ErrorCode::InvalidInput, "negative exponent");
    TruncatedPolynomial p(num_vars, order);
    p.add_term(std::move(e), std::move(c));
    return p;
  }

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const {
    return coefficient(Exponents(static_cast<std::size_t>(num_vars_), 0));
  }

  /// Smallest total degree among nonzero terms; nullopt for the zero
  /// polynomial (conventionally +infinity).
  std::optional<int> lowest_degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.begin()->first);
  }

  int highest_degree() const {
    return terms_.empty() ? 0 : total_degree(terms_.rbegin()->first);
  }

  TruncatedPolynomial operator-() const {
    TruncatedPolynomial r(num_vars_, order_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  TruncatedPolynomial operator+(const TruncatedPolynomial& o) const {
    check_compatible(o);
    TruncatedPolynomial r(*this);
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  TruncatedPolynomial operator-(const TruncatedPolynomial& o) const {
    check_compatible(o);
    TruncatedPolynomial r(*this);
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
  }

  TruncatedPolynomial& operator+=(const TruncatedPolynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  TruncatedPolynomial& operator-=(const TruncatedPolynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  /// Product in the quotient ring: terms above the truncation order vanish.
  TruncatedPolynomial operator*(const TruncatedPolynomial& o) const {
    check_compatible(o);
    TruncatedPolynomial r(num_vars_, order_);
    for (const auto& [ea, ca] : terms_) {
      const int da = total_degree(ea);
      for (const auto& [eb, cb] : o.terms_) {
        if (da + total_degree(eb) > order_) continue;
        Exponents e(ea);
        for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
        r.add_term(std::move(e), ca * cb);
      }
    }
    return r;
  }

  TruncatedPolynomial operator*(const Rational& s) const {
    TruncatedPolynomial r(num_vars_, order_);
    if (s == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
    return r;
  }

  // Hidden friend: found by ADL only, so it never participates in overload
  // resolution for unrelated (e.g. matrix expression) operands.
  friend TruncatedPolynomial operator*(const Rational& s,
                                       const TruncatedPolynomial& p) {
    return p * s;
  }

  bool operator==(const TruncatedPolynomial& o) const {
    return num_vars_ == o.num_vars_ && order_ == o.order_ && terms_ == o.terms_;
  }
  bool operator!=(const TruncatedPolynomial& o) const { return !(*this == o); }

  /// d/dx_{var+1} (0-based var index).
  TruncatedPolynomial derivative(int var) const {
    require(var >= 0 && var < num_vars_, ErrorCode::IndexOutOfRange,
            "derivative index out of range");
    TruncatedPolynomial r(num_vars_, order_);
    for (const auto& [e, c] : terms_) {
      const int p = e[static_cast<std::size_t>(var)];
      if (p == 0) continue;
      Exponents d(e);
      --d[static_cast<std::size_t>(var)];
      r.add_term(std::move(d), c * p);
    }
    return r;
  }

  /// Drops every term of total degree above max_degree. The ring order is
  /// unchanged; this is reduction modulo the degree filtration.
  TruncatedPolynomial truncated_to(int max_degree) const {
    TruncatedPolynomial r(num_vars_, order_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) <= max_degree) r.terms_.emplace(e, c);
    return r;
  }

  TruncatedPolynomial homogeneous_part(int degree) const {
    TruncatedPolynomial r(num_vars_, order_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == degree) r.terms_.emplace(e, c);
    return r;
  }

  /// Re-truncates to a different order (extends trivially when raising).
  TruncatedPolynomial with_order(int new_order) const {
    TruncatedPolynomial r(num_vars_, new_order);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) <= new_order) r.terms_.emplace(e, c);
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << to_fraction_string(c) << ")";
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        os << "*x" << (k + 1);
        if (e[k] > 1) os << "^" << e[k];
      }
    }
    return os.str();
  }

  // Internal mutator used by builders; keeps canonical form.
  void add_term(Exponents e, Rational c) {
    require(static_cast<int>(e.size()) == num_vars_,
            ErrorCode::DimensionMismatch, "exponent vector length mismatch");
    if (c == 0 || total_degree(e) > order_) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(std::move(e), std::move(c));
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  void check_compatible(const TruncatedPolynomial& o) const {
    require(num_vars_ == o.num_vars_ && order_ == o.order_,
            ErrorCode::DimensionMismatch,
            "operands live in different truncated rings");
  }

  int num_vars_;
  int order_;
  TermMap terms_;
};

/// d/dx_i with the 1-based index used by the serialized formats.
inline TruncatedPolynomial partial_derivative(const TruncatedPolynomial& p,
                                              int i) {
  require(i >= 1 && i <= p.num_vars(), ErrorCode::IndexOutOfRange,
          "partial derivative index out of range");
  return p.derivative(i - 1);
}

/// Formal change of coordinates y_i = phi_i(x): components have zero
/// constant term and an invertible degree-1 part.
class CoordinateChange {
 public:
  explicit CoordinateChange(std::vector<TruncatedPolynomial> components)
      : components_(std::move(components)) {
    require(!components_.empty(), ErrorCode::InvalidInput,
            "coordinate change needs at least one component");
    const int n = static_cast<int>(components_.size());
    for (const auto& c : components_) {
      require(c.num_vars() == n, ErrorCode::DimensionMismatch,
              "component count must equal the number of variables");
      require(c.order() == components_[0].order(), ErrorCode::DimensionMismatch,
              "components must share one truncation order");
      require(c.constant_term() == 0, ErrorCode::InvalidInput,
              "coordinate change components must vanish at the origin");
    }
    require(linear_part().det() != 0, ErrorCode::SingularLinearPart,
            "coordinate change has singular degree-1 part");
  }

  static CoordinateChange identity(int num_vars, int order) {
    std::vector<TruncatedPolynomial> comps;
    comps.reserve(static_cast<std::size_t>(num_vars));
    for (int i = 0; i < num_vars; ++i)
      comps.push_back(TruncatedPolynomial::variable(num_vars, order, i));
    return CoordinateChange(std::move(comps));
  }

  int num_vars() const { return static_cast<int>(components_.size()); }
  int order() const { return components_[0].order(); }
  const std::vector<TruncatedPolynomial>& components() const {
    return components_;
  }
  const TruncatedPolynomial& component(int i) const {
    require(i >= 0 && i < num_vars(), ErrorCode::IndexOutOfRange,
            "component index out of range");
    return components_[static_cast<std::size_t>(i)];
  }

  bool operator==(const CoordinateChange& o) const {
    return components_ == o.components_;
  }

  /// Matrix L with L(i,j) = coefficient of x_{j+1} in component i.
  RatMat linear_part() const {
    const int n = num_vars();
    RatMat l(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Exponents e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(j)] = 1;
        l.at(i, j) = components_[static_cast<std::size_t>(i)].coefficient(e);
      }
    return l;
  }

  bool is_identity() const { return *this == identity(num_vars(), order()); }

 private:
  std::vector<TruncatedPolynomial> components_;
};

/// Substitutes phi into p: returns p(phi_1(x), ..., phi_n(x)).
inline TruncatedPolynomial substitute(const TruncatedPolynomial& p,
                                      const CoordinateChange& phi) {
  require(p.num_vars() == phi.num_vars() && p.order() == phi.order(),
          ErrorCode::DimensionMismatch,
          "substitution requires matching variable count and order");
  const int n = p.num_vars();
  const int order = p.order();
  // Power cache: powers[i][k] = phi_i^k, built on demand.
  std::vector<std::vector<TruncatedPolynomial>> powers(
      static_cast<std::size_t>(n),
      {TruncatedPolynomial::constant(n, order, 1)});
  auto power = [&](int i, int k) -> const TruncatedPolynomial& {
    auto& row = powers[static_cast<std::size_t>(i)];
    while (static_cast<int>(row.size()) <= k)
      row.push_back(row.back() * phi.component(i));
    return row[static_cast<std::size_t>(k)];
  };
  TruncatedPolynomial result(n, order);
  for (const auto& [e, c] : p.terms()) {
    TruncatedPolynomial prod = TruncatedPolynomial::constant(n, order, c);
    for (int i = 0; i < n; ++i)
      if (e[static_cast<std::size_t>(i)] > 0)
        prod = prod * power(i, e[static_cast<std::size_t>(i)]);
    result += prod;
  }
  return result;
}

/// Composition (outer o inner): component i is outer_i(inner).
inline CoordinateChange compose(const CoordinateChange& outer,
                                const CoordinateChange& inner) {
  std::vector<TruncatedPolynomial> comps;
  comps.reserve(static_cast<std::size_t>(outer.num_vars()));
  for (int i = 0; i < outer.num_vars(); ++i)
    comps.push_back(substitute(outer.component(i), inner));
  return CoordinateChange(std::move(comps));
}

/// Formal inverse of phi to the shared truncation order, found by the
/// fixed-point iteration psi <- L^{-1}(y - H(psi)) where phi = L + H.
inline CoordinateChange invert_change(const CoordinateChange& phi) {
  const int n = phi.num_vars();
  const int order = phi.order();
  const RatMat l = phi.linear_part();
  const auto linv = l.inverse();
  require(linv.has_value(), ErrorCode::SingularLinearPart,
          "cannot invert a change with singular degree-1 part");

  // H = higher-degree tail of phi.
  std::vector<TruncatedPolynomial> tail;
  tail.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& c = phi.component(i);
    tail.push_back(c - c.truncated_to(1));
  }

  auto linear_apply = [&](const std::vector<TruncatedPolynomial>& v) {
    std::vector<TruncatedPolynomial> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      TruncatedPolynomial acc(n, order);
      for (int j = 0; j < n; ++j)
        acc += v[static_cast<std::size_t>(j)] * linv->at(i, j);
      out.push_back(std::move(acc));
    }
    return out;
  };

  std::vector<TruncatedPolynomial> ident;
  for (int i = 0; i < n; ++i)
    ident.push_back(TruncatedPolynomial::variable(n, order, i));

  // psi_0 = L^{-1} y is exact when H = 0; each sweep fixes one more degree.
  std::vector<TruncatedPolynomial> psi = linear_apply(ident);
  for (int sweep = 0; sweep < order; ++sweep) {
    CoordinateChange cur(psi);
    std::vector<TruncatedPolynomial> rhs;
    rhs.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      rhs.push_back(ident[static_cast<std::size_t>(j)] -
                    substitute(tail[static_cast<std::size_t>(j)], cur));
    auto next = linear_apply(rhs);
    if (next == psi) break;
    psi = std::move(next);
  }
  return CoordinateChange(std::move(psi));
}

}  // namespace levi
