#pragma once

#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/truncpoly.hpp"

namespace levi {

/// Formal Poisson structure on n coordinates, truncated at a fixed order.
/// The full antisymmetric table pi[i][j] = {x_{i+1}, x_{j+1}} is stored;
/// every entry vanishes at the origin.
class PoissonStructure {
 public:
  PoissonStructure(int n, int order)
      : n_(n), order_(order),
        pi_(static_cast<std::size_t>(n),
            std::vector<TruncatedPolynomial>(
                static_cast<std::size_t>(n),
                TruncatedPolynomial(n, order))) {
    require(n >= 1, ErrorCode::InvalidInput, "need at least one coordinate");
  }

  /// Builds from the strict upper triangle; the rest follows by antisymmetry.
  static PoissonStructure from_upper_triangle(
      int n, int order,
      const std::vector<std::pair<std::pair<int, int>, TruncatedPolynomial>>&
          entries) {
    PoissonStructure p(n, order);
    for (const auto& [ij, poly] : entries) p.set_entry(ij.first, ij.second, poly);
    return p;
  }

  int dim() const { return n_; }
  int order() const { return order_; }

  const TruncatedPolynomial& entry(int i, int j) const {
    check_pair(i, j);
    return pi_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }

  /// Sets {x_{i+1}, x_{j+1}} for i < j and mirrors the antisymmetric entry.
  void set_entry(int i, int j, const TruncatedPolynomial& p) {
    check_pair(i, j);
    require(i < j, ErrorCode::InvalidInput,
            "set_entry expects a strict upper-triangle position");
    require(p.num_vars() == n_ && p.order() == order_,
            ErrorCode::DimensionMismatch, "bracket entry ring mismatch");
    require(p.constant_term() == 0, ErrorCode::InvalidInput,
            "bracket entries must vanish at the origin");
    pi_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p;
    pi_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -p;
  }

  bool operator==(const PoissonStructure& o) const {
    return n_ == o.n_ && order_ == o.order_ && pi_ == o.pi_;
  }

  /// {f, g} = sum_{i<j} pi_ij (d_i f d_j g - d_j f d_i g).
  TruncatedPolynomial bracket(const TruncatedPolynomial& f,
                              const TruncatedPolynomial& g) const {
    require(f.num_vars() == n_ && g.num_vars() == n_ &&
                f.order() == order_ && g.order() == order_,
            ErrorCode::DimensionMismatch, "bracket argument ring mismatch");
    TruncatedPolynomial acc(n_, order_);
    std::vector<TruncatedPolynomial> df, dg;
    df.reserve(static_cast<std::size_t>(n_));
    dg.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      df.push_back(f.derivative(i));
      dg.push_back(g.derivative(i));
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const auto& p = pi_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (p.is_zero()) continue;
        acc += p * (df[static_cast<std::size_t>(i)] * dg[static_cast<std::size_t>(j)] -
                    df[static_cast<std::size_t>(j)] * dg[static_cast<std::size_t>(i)]);
      }
    return acc;
  }

  /// {{x_i, x_j}, x_k} + cyclic. Vanishes modulo degree > order-1 exactly
  /// when the structure satisfies Jacobi to the stored precision.
  TruncatedPolynomial jacobiator(int i, int j, int k) const {
    check_pair(i, j);
    check_pair(j, k);
    auto x = [&](int v) {
      return TruncatedPolynomial::variable(n_, order_, v);
    };
    return bracket(entry(i, j), x(k)) + bracket(entry(j, k), x(i)) +
           bracket(entry(k, i), x(j));
  }

  /// Jacobi check modulo degree > order-1 over all index triples.
  bool satisfies_jacobi() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k)
          if (!jacobiator(i, j, k).truncated_to(order_ - 1).is_zero())
            return false;
    return true;
  }

  /// Structure transported along y = phi(x): entry (i,j) of the result is
  /// {phi_i, phi_j} written in the y coordinates.
  PoissonStructure pushforward(const CoordinateChange& phi) const {
    require(phi.num_vars() == n_ && phi.order() == order_,
            ErrorCode::DimensionMismatch, "pushforward change ring mismatch");
    const CoordinateChange inv = invert_change(phi);
    PoissonStructure out(n_, order_);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        out.set_entry(i, j,
                      substitute(bracket(phi.component(i), phi.component(j)),
                                 inv));
    return out;
  }

  /// Coefficients c_ij^k of the degree-1 part: result[k](i,j) is the
  /// coefficient of x_{k+1} in pi_ij.
  std::vector<RatMat> linear_part() const {
    std::vector<RatMat> c(static_cast<std::size_t>(n_), RatMat(n_, n_));
    for (int k = 0; k < n_; ++k) {
      Exponents e(static_cast<std::size_t>(n_), 0);
      e[static_cast<std::size_t>(k)] = 1;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          c[static_cast<std::size_t>(k)].at(i, j) = entry(i, j).coefficient(e);
    }
    return c;
  }

 private:
  void check_pair(int i, int j) const {
    require(i >= 0 && i < n_ && j >= 0 && j < n_, ErrorCode::IndexOutOfRange,
            "bracket index out of range");
  }

  int n_;
  int order_;
  std::vector<std::vector<TruncatedPolynomial>> pi_;
};

}  // namespace levi
