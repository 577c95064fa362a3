#pragma once

#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/liecoh.hpp"
#include "levi/truncpoly.hpp"

namespace levi {

/// Square matrix of truncated polynomials; entries share one ring.
using PolyMat = std::vector<std::vector<TruncatedPolynomial>>;

inline PolyMat poly_mat_identity(int n, int num_vars, int order) {
  PolyMat m(static_cast<std::size_t>(n),
            std::vector<TruncatedPolynomial>(
                static_cast<std::size_t>(n),
                TruncatedPolynomial(num_vars, order)));
  for (int i = 0; i < n; ++i)
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
        TruncatedPolynomial::constant(num_vars, order, 1);
  return m;
}

inline PolyMat poly_mat_mul(const PolyMat& a, const PolyMat& b) {
  const std::size_t n = a.size();
  require(b.size() == n, ErrorCode::DimensionMismatch,
          "polynomial matrix product shape mismatch");
  const auto& ring = a[0][0];
  PolyMat r(n, std::vector<TruncatedPolynomial>(
                   n, TruncatedPolynomial(ring.num_vars(), ring.order())));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[k][j].is_zero()) continue;
        r[i][j] += a[i][k] * b[k][j];
      }
    }
  return r;
}

/// Change of frame on a rank-n algebroid over a d-dimensional base:
/// e~_i = sum_a T(i,a) e_a with polynomial entries and T(0) invertible.
class FrameChange {
 public:
  explicit FrameChange(PolyMat entries) : t_(std::move(entries)) {
    require(!t_.empty(), ErrorCode::InvalidInput, "empty frame change");
    const std::size_t n = t_.size();
    for (const auto& row : t_) {
      require(row.size() == n, ErrorCode::DimensionMismatch,
              "frame change matrix must be square");
      for (const auto& e : row)
        require(e.num_vars() == t_[0][0].num_vars() &&
                    e.order() == t_[0][0].order(),
                ErrorCode::DimensionMismatch,
                "frame change entries must share one ring");
    }
    require(constant_part().det() != 0, ErrorCode::SingularLinearPart,
            "frame change is singular at the origin");
  }

  static FrameChange identity(int rank, int base_dim, int order) {
    return FrameChange(poly_mat_identity(rank, base_dim, order));
  }

  int rank() const { return static_cast<int>(t_.size()); }
  int base_dim() const { return t_[0][0].num_vars(); }
  int order() const { return t_[0][0].order(); }
  const PolyMat& entries() const { return t_; }
  const TruncatedPolynomial& entry(int i, int a) const {
    require(i >= 0 && i < rank() && a >= 0 && a < rank(),
            ErrorCode::IndexOutOfRange, "frame change index out of range");
    return t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
  }

  RatMat constant_part() const {
    const int n = rank();
    RatMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m.at(i, j) = t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                         .constant_term();
    return m;
  }

  bool operator==(const FrameChange& o) const { return t_ == o.t_; }

  /// Inverse to the shared truncation order: with T = T0(I + T0^{-1} S),
  /// the Neumann series in the nilpotent part terminates at the order.
  FrameChange inverse() const {
    const int n = rank();
    const int nv = base_dim();
    const int ord = order();
    const RatMat t0 = constant_part();
    const auto t0inv = t0.inverse();
    require(t0inv.has_value(), ErrorCode::SingularLinearPart,
            "frame change is singular at the origin");
    PolyMat t0inv_poly(static_cast<std::size_t>(n),
                       std::vector<TruncatedPolynomial>(
                           static_cast<std::size_t>(n),
                           TruncatedPolynomial(nv, ord)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (t0inv->at(i, j) != 0)
          t0inv_poly[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
              TruncatedPolynomial::constant(nv, ord, t0inv->at(i, j));
    // N = -T0^{-1} S where S is the zero-constant tail of T.
    PolyMat s(t_);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto& e = s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        e = e - TruncatedPolynomial::constant(nv, ord, e.constant_term());
      }
    PolyMat neg = poly_mat_mul(t0inv_poly, s);
    for (auto& row : neg)
      for (auto& e : row) e = -e;
    PolyMat acc = poly_mat_identity(n, nv, ord);
    PolyMat pw = poly_mat_identity(n, nv, ord);
    for (int p = 1; p <= ord; ++p) {
      pw = poly_mat_mul(pw, neg);
      bool all_zero = true;
      for (std::size_t i = 0; i < pw.size() && all_zero; ++i)
        for (std::size_t j = 0; j < pw.size(); ++j)
          if (!pw[i][j].is_zero()) { all_zero = false; break; }
      if (all_zero) break;
      for (std::size_t i = 0; i < acc.size(); ++i)
        for (std::size_t j = 0; j < acc.size(); ++j) acc[i][j] += pw[i][j];
    }
    return FrameChange(poly_mat_mul(acc, t0inv_poly));
  }

 private:
  PolyMat t_;
};

/// Applying `second` after `first`: the combined matrix is second * first.
inline FrameChange compose_frames(const FrameChange& second,
                                  const FrameChange& first) {
  require(second.rank() == first.rank() &&
              second.base_dim() == first.base_dim() &&
              second.order() == first.order(),
          ErrorCode::DimensionMismatch, "frame change composition mismatch");
  return FrameChange(poly_mat_mul(second.entries(), first.entries()));
}

/// Formal Lie algebroid over a d-dimensional base germ: a rank-n frame with
/// polynomial structure functions [e_i, e_j] = sum_k c_ij^k(x) e_k and an
/// anchor rho(e_i) = sum_u b_iu(x) d/dx_u whose coefficients vanish at 0.
class LieAlgebroid {
 public:
  LieAlgebroid(int rank, int base_dim, int order,
               std::vector<TruncatedPolynomial> structure,
               std::vector<TruncatedPolynomial> anchor)
      : rank_(rank), base_dim_(base_dim), order_(order),
        c_(std::move(structure)), b_(std::move(anchor)) {
    require(rank >= 1 && base_dim >= 1, ErrorCode::InvalidInput,
            "algebroid needs positive rank and base dimension");
    const std::size_t n = static_cast<std::size_t>(rank);
    const std::size_t d = static_cast<std::size_t>(base_dim);
    require(c_.size() == n * n * n, ErrorCode::DimensionMismatch,
            "structure function tensor size");
    require(b_.size() == n * d, ErrorCode::DimensionMismatch,
            "anchor table size");
    for (const auto& p : c_)
      require(p.num_vars() == base_dim && p.order() == order,
              ErrorCode::DimensionMismatch, "structure function ring mismatch");
    for (const auto& p : b_) {
      require(p.num_vars() == base_dim && p.order() == order,
              ErrorCode::DimensionMismatch, "anchor ring mismatch");
      require(p.constant_term() == 0, ErrorCode::InvalidInput,
              "anchor coefficients must vanish at the origin");
    }
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < rank_; ++j)
        for (int k = 0; k < rank_; ++k)
          require(c(i, j, k) == -c(j, i, k), ErrorCode::InvalidInput,
                  "structure functions are not antisymmetric");
  }

  /// Algebroid of an infinitesimal action: constant structure functions
  /// from g and linear anchor b_ij = (M_i x)_j. The matrices must satisfy
  /// [M_i, M_j] = -sum_k c_ij^k M_k; this is verified via the residuals.
  static LieAlgebroid action_algebroid(const LieAlgebra& g,
                                       const std::vector<RatMat>& m,
                                       int order) {
    const int n = g.dim();
    require(static_cast<int>(m.size()) == n, ErrorCode::DimensionMismatch,
            "one action matrix per generator required");
    const int d = m[0].rows();
    std::vector<TruncatedPolynomial> c(
        static_cast<std::size_t>(n) * n * n, TruncatedPolynomial(d, order));
    std::vector<TruncatedPolynomial> b(
        static_cast<std::size_t>(n) * d, TruncatedPolynomial(d, order));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (g.c(i, j, k) != 0)
            c[(static_cast<std::size_t>(i) * n + j) * n + k] =
                TruncatedPolynomial::constant(d, order, g.c(i, j, k));
    for (int i = 0; i < n; ++i) {
      require(m[static_cast<std::size_t>(i)].rows() == d &&
                  m[static_cast<std::size_t>(i)].cols() == d,
              ErrorCode::DimensionMismatch, "action matrices must be d x d");
      for (int j = 0; j < d; ++j) {
        TruncatedPolynomial p(d, order);
        for (int k = 0; k < d; ++k)
          if (m[static_cast<std::size_t>(i)].at(j, k) != 0)
            p.add_term([&] {
              Exponents e(static_cast<std::size_t>(d), 0);
              e[static_cast<std::size_t>(k)] = 1;
              return e;
            }(), m[static_cast<std::size_t>(i)].at(j, k));
        b[static_cast<std::size_t>(i) * d + j] = std::move(p);
      }
    }
    LieAlgebroid a(n, d, order, std::move(c), std::move(b));
    require(a.satisfies_axioms(), ErrorCode::NotAnAlgebroid,
            "matrices do not define an action algebroid");
    return a;
  }

  int rank() const { return rank_; }
  int base_dim() const { return base_dim_; }
  int order() const { return order_; }

  const TruncatedPolynomial& c(int i, int j, int k) const {
    check_frame(i); check_frame(j); check_frame(k);
    return c_[(static_cast<std::size_t>(i) * rank_ + j) * rank_ + k];
  }
  const TruncatedPolynomial& anchor(int i, int u) const {
    check_frame(i); check_base(u);
    return b_[static_cast<std::size_t>(i) * base_dim_ + u];
  }

  bool operator==(const LieAlgebroid& o) const {
    return rank_ == o.rank_ && base_dim_ == o.base_dim_ &&
           order_ == o.order_ && c_ == o.c_ && b_ == o.b_;
  }

  /// rho(e_i) applied to a base function.
  TruncatedPolynomial anchor_apply(int i, const TruncatedPolynomial& f) const {
    check_frame(i);
    TruncatedPolynomial acc(base_dim_, order_);
    for (int u = 0; u < base_dim_; ++u) {
      const auto& biu = anchor(i, u);
      if (!biu.is_zero()) acc += biu * f.derivative(u);
    }
    return acc;
  }

  /// d/dx_l-coefficient of [rho(e_i), rho(e_j)] - rho([e_i, e_j]), up to
  /// sign: sum_k c_ij^k b_kl - sum_m (b_im d_m b_jl - b_jm d_m b_il),
  /// reduced modulo degree > order-1.
  TruncatedPolynomial anchor_compat_residual(int i, int j, int l) const {
    check_frame(i); check_frame(j); check_base(l);
    TruncatedPolynomial acc(base_dim_, order_);
    for (int k = 0; k < rank_; ++k) {
      const auto& cijk = c(i, j, k);
      if (!cijk.is_zero()) acc += cijk * anchor(k, l);
    }
    acc -= anchor_apply(i, anchor(j, l));
    acc += anchor_apply(j, anchor(i, l));
    return acc.truncated_to(order_ - 1);
  }

  /// e_l-coefficient of the bracket Jacobi defect:
  /// sum over cyclic (i,j,k) of sum_m c_jk^m c_im^l + rho(e_i).c_jk^l,
  /// reduced modulo degree > order-1.
  TruncatedPolynomial jacobiator(int i, int j, int k, int l) const {
    check_frame(i); check_frame(j); check_frame(k); check_frame(l);
    TruncatedPolynomial acc(base_dim_, order_);
    const int idx[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
    for (const auto& t : idx) {
      for (int m = 0; m < rank_; ++m) {
        const auto& inner = c(t[1], t[2], m);
        if (!inner.is_zero()) acc += inner * c(t[0], m, l);
      }
      acc += anchor_apply(t[0], c(t[1], t[2], l));
    }
    return acc.truncated_to(order_ - 1);
  }

  /// Checks both families of residuals, exactly, modulo degree > order-1.
  bool satisfies_axioms() const {
    for (int i = 0; i < rank_; ++i)
      for (int j = i + 1; j < rank_; ++j)
        for (int l = 0; l < base_dim_; ++l)
          if (!anchor_compat_residual(i, j, l).is_zero()) return false;
    for (int i = 0; i < rank_; ++i)
      for (int j = i + 1; j < rank_; ++j)
        for (int k = j + 1; k < rank_; ++k)
          for (int l = 0; l < rank_; ++l)
            if (!jacobiator(i, j, k, l).is_zero()) return false;
    return true;
  }

  /// B^i with (B^i)(j,k) = d b_ij / d x_k at the origin.
  std::vector<RatMat> linear_anchor() const {
    std::vector<RatMat> out;
    out.reserve(static_cast<std::size_t>(rank_));
    for (int i = 0; i < rank_; ++i) {
      RatMat m(base_dim_, base_dim_);
      for (int j = 0; j < base_dim_; ++j)
        for (int k = 0; k < base_dim_; ++k) {
          Exponents e(static_cast<std::size_t>(base_dim_), 0);
          e[static_cast<std::size_t>(k)] = 1;
          m.at(j, k) = anchor(i, j).coefficient(e);
        }
      out.push_back(std::move(m));
    }
    return out;
  }

  /// Structure constants at the origin; throws NotAnAlgebroid when they
  /// fail antisymmetry or Jacobi.
  LieAlgebra fiber_algebra() const {
    std::vector<Rational> k(static_cast<std::size_t>(rank_) * rank_ * rank_);
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < rank_; ++j)
        for (int l = 0; l < rank_; ++l)
          k[(static_cast<std::size_t>(i) * rank_ + j) * rank_ + l] =
              c(i, j, l).constant_term();
    try {
      return LieAlgebra(rank_, std::move(k));
    } catch (const Error& e) {
      fail(ErrorCode::NotAnAlgebroid,
           std::string("fiber constants are not a Lie algebra (") + e.what() +
               ")");
    }
  }

  /// New description in the frame e~_i = sum_a T(i,a) e_a.
  LieAlgebroid change_frame(const FrameChange& t) const {
    require(t.rank() == rank_ && t.base_dim() == base_dim_ &&
                t.order() == order_,
            ErrorCode::DimensionMismatch, "frame change shape mismatch");
    const FrameChange tinv = t.inverse();
    std::vector<TruncatedPolynomial> nc(
        static_cast<std::size_t>(rank_) * rank_ * rank_,
        TruncatedPolynomial(base_dim_, order_));
    std::vector<TruncatedPolynomial> nb(
        static_cast<std::size_t>(rank_) * base_dim_,
        TruncatedPolynomial(base_dim_, order_));
    for (int i = 0; i < rank_; ++i)
      for (int u = 0; u < base_dim_; ++u) {
        TruncatedPolynomial acc(base_dim_, order_);
        for (int a = 0; a < rank_; ++a) {
          const auto& tia = t.entry(i, a);
          if (!tia.is_zero()) acc += tia * anchor(a, u);
        }
        nb[static_cast<std::size_t>(i) * base_dim_ + u] = std::move(acc);
      }
    // [e~_i, e~_j] = sum_m F_ij^m e_m, then convert back with T^{-1}.
    for (int i = 0; i < rank_; ++i)
      for (int j = i + 1; j < rank_; ++j) {
        std::vector<TruncatedPolynomial> f(
            static_cast<std::size_t>(rank_),
            TruncatedPolynomial(base_dim_, order_));
        for (int m = 0; m < rank_; ++m) {
          TruncatedPolynomial acc(base_dim_, order_);
          for (int a = 0; a < rank_; ++a) {
            const auto& tia = t.entry(i, a);
            if (tia.is_zero()) continue;
            for (int b = 0; b < rank_; ++b) {
              const auto& cabm = c(a, b, m);
              if (!cabm.is_zero()) acc += tia * t.entry(j, b) * cabm;
            }
          }
          for (int a = 0; a < rank_; ++a) {
            if (!t.entry(i, a).is_zero())
              acc += t.entry(i, a) * anchor_apply(a, t.entry(j, m));
            if (!t.entry(j, a).is_zero())
              acc -= t.entry(j, a) * anchor_apply(a, t.entry(i, m));
          }
          f[static_cast<std::size_t>(m)] = std::move(acc);
        }
        for (int l = 0; l < rank_; ++l) {
          TruncatedPolynomial acc(base_dim_, order_);
          for (int m = 0; m < rank_; ++m) {
            const auto& w = tinv.entry(m, l);
            if (!w.is_zero() && !f[static_cast<std::size_t>(m)].is_zero())
              acc += f[static_cast<std::size_t>(m)] * w;
          }
          nc[(static_cast<std::size_t>(i) * rank_ + j) * rank_ + l] = acc;
          nc[(static_cast<std::size_t>(j) * rank_ + i) * rank_ + l] = -acc;
        }
      }
    return LieAlgebroid(rank_, base_dim_, order_, std::move(nc), std::move(nb));
  }

  /// New description in base coordinates y = chi(x).
  LieAlgebroid change_coordinates(const CoordinateChange& chi) const {
    require(chi.num_vars() == base_dim_ && chi.order() == order_,
            ErrorCode::DimensionMismatch, "coordinate change shape mismatch");
    const CoordinateChange inv = invert_change(chi);
    std::vector<TruncatedPolynomial> nc;
    nc.reserve(c_.size());
    for (const auto& p : c_) nc.push_back(substitute(p, inv));
    std::vector<TruncatedPolynomial> nb(
        static_cast<std::size_t>(rank_) * base_dim_,
        TruncatedPolynomial(base_dim_, order_));
    for (int i = 0; i < rank_; ++i)
      for (int u = 0; u < base_dim_; ++u)
        nb[static_cast<std::size_t>(i) * base_dim_ + u] =
            substitute(anchor_apply(i, chi.component(u)), inv);
    return LieAlgebroid(rank_, base_dim_, order_, std::move(nc), std::move(nb));
  }

 private:
  void check_frame(int i) const {
    require(i >= 0 && i < rank_, ErrorCode::IndexOutOfRange,
            "frame index out of range");
  }
  void check_base(int u) const {
    require(u >= 0 && u < base_dim_, ErrorCode::IndexOutOfRange,
            "base index out of range");
  }

  int rank_, base_dim_, order_;
  std::vector<TruncatedPolynomial> c_;  // c[(i*n + j)*n + k]
  std::vector<TruncatedPolynomial> b_;  // b[i*d + u]
};

}  // namespace levi
