#pragma once

#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "levi/errors.hpp"
#include "levi/exact_linear.hpp"
#include "levi/monomial.hpp"
#include "levi/rational.hpp"

namespace levi {

/// Finite-dimensional Lie algebra given by exact structure constants:
/// [e_i, e_j] = sum_k c(i,j,k) e_k. Antisymmetry and Jacobi are enforced
/// at construction.
class LieAlgebra {
 public:
  LieAlgebra(int dim, std::vector<Rational> constants)
      : dim_(dim), c_(std::move(constants)) {
    require(dim >= 1, ErrorCode::InvalidInput, "algebra dimension must be >= 1");
    require(c_.size() == static_cast<std::size_t>(dim) * dim * dim,
            ErrorCode::DimensionMismatch, "structure constant tensor size");
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          require(c(i, j, k) == -c(j, i, k), ErrorCode::InvalidInput,
                  "structure constants are not antisymmetric");
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j < dim_; ++j)
        for (int k = j + 1; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l) {
            Rational s = 0;
            for (int m = 0; m < dim_; ++m)
              s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) +
                   c(k, i, m) * c(m, j, l);
            require(s == 0, ErrorCode::InvalidInput,
                    "structure constants violate the Jacobi identity");
          }
  }

  /// Builds from strict upper-triangle bracket entries (i, j, k, value),
  /// 0-based, meaning [e_i, e_j] has e_k coefficient `value`.
  static LieAlgebra from_brackets(
      int dim,
      const std::vector<std::tuple<int, int, int, Rational>>& entries) {
    std::vector<Rational> c(static_cast<std::size_t>(dim) * dim * dim);
    auto at = [&](int i, int j, int k) -> Rational& {
      return c[(static_cast<std::size_t>(i) * dim + j) * dim + k];
    };
    for (const auto& [i, j, k, v] : entries) {
      require(i >= 0 && j >= 0 && k >= 0 && i < dim && j < dim && k < dim,
              ErrorCode::IndexOutOfRange, "bracket entry index out of range");
      require(i < j, ErrorCode::InvalidInput,
              "bracket entries must have i < j");
      at(i, j, k) = v;
      at(j, i, k) = -v;
    }
    return LieAlgebra(dim, std::move(c));
  }

  /// so(3): [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e2.
  static LieAlgebra so3() {
    return from_brackets(3, {{0, 1, 2, 1}, {1, 2, 0, 1}, {0, 2, 1, -1}});
  }

  static LieAlgebra abelian(int dim) {
    return LieAlgebra(dim,
                      std::vector<Rational>(
                          static_cast<std::size_t>(dim) * dim * dim, 0));
  }

  int dim() const { return dim_; }

  const Rational& c(int i, int j, int k) const {
    return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }

  RatVec bracket(const RatVec& x, const RatVec& y) const {
    require(x.size() == static_cast<std::size_t>(dim_) && y.size() == x.size(),
            ErrorCode::DimensionMismatch, "bracket operand length");
    RatVec z(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const Rational p = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        if (p == 0) continue;
        for (int k = 0; k < dim_; ++k)
          if (c(i, j, k) != 0) z[static_cast<std::size_t>(k)] += p * c(i, j, k);
      }
    return z;
  }

  /// B(i,j) = sum_{a,b} c(i,a,b) c(j,b,a), the trace form of the adjoint.
  RatMat killing_form() const {
    RatMat b(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        Rational s = 0;
        for (int a = 0; a < dim_; ++a)
          for (int x = 0; x < dim_; ++x) s += c(i, a, x) * c(j, x, a);
        b.at(i, j) = s;
      }
    return b;
  }

  /// Cartan criterion with an exact determinant; no tolerance involved.
  bool is_semisimple() const { return killing_form().det() != 0; }

  bool operator==(const LieAlgebra& o) const {
    return dim_ == o.dim_ && c_ == o.c_;
  }
  bool operator!=(const LieAlgebra& o) const { return !(*this == o); }

 private:
  int dim_;
  std::vector<Rational> c_;  // c[(i*dim + j)*dim + k]
};

/// Representation of a LieAlgebra on Q^m by exact matrices rho(e_i).
/// The commutator identity [rho(e_i), rho(e_j)] = rho([e_i, e_j]) is an
/// invariant; the public constructor verifies it.
class Representation {
 public:
  Representation(LieAlgebra algebra, std::vector<RatMat> action)
      : Representation(std::move(algebra), std::move(action), true) {}

  static Representation trivial(LieAlgebra algebra, int module_dim = 1) {
    std::vector<RatMat> act(static_cast<std::size_t>(algebra.dim()),
                            RatMat(module_dim, module_dim));
    return Representation(std::move(algebra), std::move(act), false);
  }

  const LieAlgebra& algebra() const { return algebra_; }
  int algebra_dim() const { return algebra_.dim(); }
  int module_dim() const { return module_dim_; }

  const RatMat& action(int i) const {
    require(i >= 0 && i < algebra_.dim(), ErrorCode::IndexOutOfRange,
            "generator index out of range");
    return action_[static_cast<std::size_t>(i)];
  }

  RatVec apply(int i, const RatVec& v) const { return action(i) * v; }

  bool operator==(const Representation& o) const {
    return algebra_ == o.algebra_ && action_ == o.action_;
  }

  /// True iff every commutator matches the bracket, exactly.
  bool is_homomorphism() const {
    const int n = algebra_.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        RatMat lhs = action(i) * action(j) - action(j) * action(i);
        RatMat rhs(module_dim_, module_dim_);
        for (int k = 0; k < n; ++k)
          if (algebra_.c(i, j, k) != 0)
            rhs = rhs + action(k) * algebra_.c(i, j, k);
        if (lhs != rhs) return false;
      }
    return true;
  }

  /// k-th symmetric power, acting by derivations on degree-k monomials in
  /// the module coordinates. Basis: monomials_of_degree(m, k) in grlex
  /// order, so k = 1 reproduces this representation verbatim.
  Representation symmetric_power(int k) const {
    require(k >= 0, ErrorCode::InvalidInput, "negative symmetric power");
    const int m = module_dim_;
    const auto basis = monomials_of_degree(m, k);
    std::map<Exponents, int, GrlexLess> index;
    for (std::size_t r = 0; r < basis.size(); ++r)
      index.emplace(basis[r], static_cast<int>(r));
    const int dim = static_cast<int>(basis.size());
    std::vector<RatMat> act;
    act.reserve(static_cast<std::size_t>(algebra_.dim()));
    for (int g = 0; g < algebra_.dim(); ++g) {
      RatMat mat(dim, dim);
      for (int col = 0; col < dim; ++col) {
        const Exponents& alpha = basis[static_cast<std::size_t>(col)];
        for (int a = 0; a < m; ++a) {
          const int pa = alpha[static_cast<std::size_t>(a)];
          if (pa == 0) continue;
          for (int b = 0; b < m; ++b) {
            const Rational& r = action(g).at(b, a);
            if (r == 0) continue;
            Exponents target(alpha);
            --target[static_cast<std::size_t>(a)];
            ++target[static_cast<std::size_t>(b)];
            mat.at(index.at(target), col) += Rational(pa) * r;
          }
        }
      }
      act.push_back(std::move(mat));
    }
    return Representation(algebra_, std::move(act), false);
  }

  /// Tensor product over the shared algebra; index (a, b) -> a*dim2 + b.
  Representation tensor_with(const Representation& other) const {
    require(algebra_ == other.algebra_, ErrorCode::AlgebraMismatch,
            "tensor product of representations of different algebras");
    const int m1 = module_dim_, m2 = other.module_dim_;
    std::vector<RatMat> act;
    act.reserve(static_cast<std::size_t>(algebra_.dim()));
    for (int g = 0; g < algebra_.dim(); ++g) {
      RatMat mat(m1 * m2, m1 * m2);
      const RatMat& r1 = action(g);
      const RatMat& r2 = other.action(g);
      for (int a = 0; a < m1; ++a)
        for (int b = 0; b < m2; ++b) {
          const int col = a * m2 + b;
          for (int a2 = 0; a2 < m1; ++a2)
            if (r1.at(a2, a) != 0) mat.at(a2 * m2 + b, col) += r1.at(a2, a);
          for (int b2 = 0; b2 < m2; ++b2)
            if (r2.at(b2, b) != 0) mat.at(a * m2 + b2, col) += r2.at(b2, b);
        }
      act.push_back(std::move(mat));
    }
    return Representation(algebra_, std::move(act), false);
  }

 private:
  friend Representation adjoint_rep(const LieAlgebra&);

  Representation(LieAlgebra algebra, std::vector<RatMat> action, bool validate)
      : algebra_(std::move(algebra)), action_(std::move(action)) {
    require(action_.size() == static_cast<std::size_t>(algebra_.dim()),
            ErrorCode::DimensionMismatch,
            "one action matrix per algebra generator required");
    require(!action_.empty(), ErrorCode::InvalidInput, "empty representation");
    module_dim_ = action_[0].rows();
    for (const auto& m : action_)
      require(m.rows() == module_dim_ && m.cols() == module_dim_,
              ErrorCode::DimensionMismatch, "action matrices must be square");
    if (validate)
      require(is_homomorphism(), ErrorCode::InvalidInput,
              "action matrices do not represent the bracket");
  }

  LieAlgebra algebra_;
  int module_dim_;
  std::vector<RatMat> action_;
};

/// rho(e_i) = ad(e_i), i.e. rho(e_i)_{kj} = c(i,j,k).
inline Representation adjoint_rep(const LieAlgebra& g) {
  std::vector<RatMat> act;
  act.reserve(static_cast<std::size_t>(g.dim()));
  for (int i = 0; i < g.dim(); ++i) {
    RatMat m(g.dim(), g.dim());
    for (int j = 0; j < g.dim(); ++j)
      for (int k = 0; k < g.dim(); ++k) m.at(k, j) = g.c(i, j, k);
    act.push_back(std::move(m));
  }
  return Representation(g, std::move(act), false);
}

/// Strictly increasing p-tuples over {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> increasing_tuples(int n, int p) {
  std::vector<std::vector<int>> out;
  if (p < 0 || p > n) return out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < n; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Alternating p-cochain on a LieAlgebra with values in a Representation's
/// module. Values are stored on increasing index tuples. Degrees 0..3.
class Cochain {
 public:
  Cochain(int degree, Representation rep)
      : degree_(degree), rep_(std::move(rep)) {
    require(degree >= 0 && degree <= 3, ErrorCode::DegreeTooHigh,
            "cochain degree must lie in 0..3");
    tuples_ = increasing_tuples(rep_.algebra_dim(), degree);
    values_.assign(tuples_.size(),
                   RatVec(static_cast<std::size_t>(rep_.module_dim())));
  }

  int degree() const { return degree_; }
  const Representation& rep() const { return rep_; }
  const std::vector<std::vector<int>>& tuples() const { return tuples_; }
  int tuple_count() const { return static_cast<int>(tuples_.size()); }

  const RatVec& value_at(int tuple_rank) const {
    require(tuple_rank >= 0 && tuple_rank < tuple_count(),
            ErrorCode::IndexOutOfRange, "tuple rank out of range");
    return values_[static_cast<std::size_t>(tuple_rank)];
  }

  void set_value(int tuple_rank, RatVec v) {
    require(tuple_rank >= 0 && tuple_rank < tuple_count(),
            ErrorCode::IndexOutOfRange, "tuple rank out of range");
    require(v.size() == static_cast<std::size_t>(rep_.module_dim()),
            ErrorCode::DimensionMismatch, "cochain value length mismatch");
    values_[static_cast<std::size_t>(tuple_rank)] = std::move(v);
  }

  int rank_of(const std::vector<int>& increasing) const {
    for (std::size_t r = 0; r < tuples_.size(); ++r)
      if (tuples_[r] == increasing) return static_cast<int>(r);
    fail(ErrorCode::IndexOutOfRange, "tuple not found");
  }

  /// Evaluates with full antisymmetry; repeated indices give zero.
  RatVec evaluate(std::vector<int> indices) const {
    require(static_cast<int>(indices.size()) == degree_,
            ErrorCode::DimensionMismatch, "wrong number of arguments");
    int sign = 1;
    for (std::size_t i = 1; i < indices.size(); ++i)
      for (std::size_t j = i; j > 0 && indices[j] < indices[j - 1]; --j) {
        std::swap(indices[j], indices[j - 1]);
        sign = -sign;
      }
    for (std::size_t i = 1; i < indices.size(); ++i)
      if (indices[i] == indices[i - 1])
        return RatVec(static_cast<std::size_t>(rep_.module_dim()));
    const RatVec& v = value_at(rank_of(indices));
    if (sign == 1) return v;
    RatVec out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = -v[k];
    return out;
  }

  bool is_zero() const {
    for (const auto& v : values_)
      for (const auto& x : v)
        if (x != 0) return false;
    return true;
  }

  Cochain operator+(const Cochain& o) const {
    check_compatible(o);
    Cochain r(*this);
    for (std::size_t t = 0; t < values_.size(); ++t)
      for (std::size_t k = 0; k < values_[t].size(); ++k)
        r.values_[t][k] += o.values_[t][k];
    return r;
  }

  Cochain operator-(const Cochain& o) const {
    check_compatible(o);
    Cochain r(*this);
    for (std::size_t t = 0; t < values_.size(); ++t)
      for (std::size_t k = 0; k < values_[t].size(); ++k)
        r.values_[t][k] -= o.values_[t][k];
    return r;
  }

  Cochain operator*(const Rational& s) const {
    Cochain r(*this);
    for (auto& v : r.values_)
      for (auto& x : v) x *= s;
    return r;
  }

  bool operator==(const Cochain& o) const {
    return degree_ == o.degree_ && rep_ == o.rep_ && values_ == o.values_;
  }

  /// Chevalley-Eilenberg differential:
  /// (d phi)(xi_0..xi_p) = sum_i (-1)^i rho(xi_i) phi(..^i..)
  ///                     + sum_{i<j} (-1)^{i+j} phi([xi_i,xi_j], ..^i..^j..).
  /// Defined here for p <= 2 (the chain stops at degree 3).
  Cochain differential() const {
    require(degree_ <= 2, ErrorCode::DegreeTooHigh,
            "differential implemented for degrees 0..2");
    const LieAlgebra& g = rep_.algebra();
    Cochain out(degree_ + 1, rep_);
    for (int t = 0; t < out.tuple_count(); ++t) {
      const auto& xi = out.tuples()[static_cast<std::size_t>(t)];
      RatVec acc(static_cast<std::size_t>(rep_.module_dim()));
      for (std::size_t i = 0; i < xi.size(); ++i) {
        std::vector<int> rest;
        for (std::size_t r = 0; r < xi.size(); ++r)
          if (r != i) rest.push_back(xi[r]);
        RatVec term = rep_.apply(xi[i], evaluate(rest));
        const int sgn = (i % 2 == 0) ? 1 : -1;
        for (std::size_t k = 0; k < acc.size(); ++k)
          acc[k] += sgn * term[k];
      }
      for (std::size_t i = 0; i < xi.size(); ++i)
        for (std::size_t j = i + 1; j < xi.size(); ++j) {
          const int sgn = ((i + j) % 2 == 0) ? 1 : -1;
          std::vector<int> rest;
          for (std::size_t r = 0; r < xi.size(); ++r)
            if (r != i && r != j) rest.push_back(xi[r]);
          for (int m = 0; m < g.dim(); ++m) {
            const Rational& cm = g.c(xi[i], xi[j], m);
            if (cm == 0) continue;
            std::vector<int> args;
            args.push_back(m);
            args.insert(args.end(), rest.begin(), rest.end());
            RatVec term = evaluate(std::move(args));
            for (std::size_t k = 0; k < acc.size(); ++k)
              acc[k] += sgn * cm * term[k];
          }
        }
      out.set_value(t, std::move(acc));
    }
    return out;
  }

  /// Flat coordinates: tuple-major, module coordinate minor.
  RatVec flatten() const {
    RatVec out;
    out.reserve(values_.size() *
                static_cast<std::size_t>(rep_.module_dim()));
    for (const auto& v : values_) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  static Cochain from_flat(int degree, const Representation& rep,
                           const RatVec& flat) {
    Cochain c(degree, rep);
    require(flat.size() == c.values_.size() *
                               static_cast<std::size_t>(rep.module_dim()),
            ErrorCode::DimensionMismatch, "flat cochain length mismatch");
    std::size_t pos = 0;
    for (auto& v : c.values_)
      for (auto& x : v) x = flat[pos++];
    return c;
  }

 private:
  void check_compatible(const Cochain& o) const {
    require(degree_ == o.degree_, ErrorCode::DimensionMismatch,
            "cochain degree mismatch");
    require(rep_ == o.rep_, ErrorCode::AlgebraMismatch,
            "cochains over different representations");
  }

  int degree_;
  Representation rep_;
  std::vector<std::vector<int>> tuples_;
  std::vector<RatVec> values_;
};

/// Matrix of the differential C^p -> C^{p+1} in flat coordinates.
inline RatMat differential_matrix(const Representation& rep, int p) {
  require(p >= 0 && p <= 2, ErrorCode::DegreeTooHigh,
          "differential defined for degrees 0..2");
  Cochain domain(p, rep);
  Cochain codomain(p + 1, rep);
  const int cols = domain.tuple_count() * rep.module_dim();
  const int rows = codomain.tuple_count() * rep.module_dim();
  RatMat mat(rows, cols);
  for (int t = 0; t < domain.tuple_count(); ++t)
    for (int v = 0; v < rep.module_dim(); ++v) {
      Cochain unit(p, rep);
      RatVec val(static_cast<std::size_t>(rep.module_dim()));
      val[static_cast<std::size_t>(v)] = 1;
      unit.set_value(t, std::move(val));
      const RatVec col = unit.differential().flatten();
      const int c = t * rep.module_dim() + v;
      for (int r = 0; r < rows; ++r)
        if (col[static_cast<std::size_t>(r)] != 0)
          mat.at(r, c) = col[static_cast<std::size_t>(r)];
    }
  return mat;
}

/// dim H^p = dim ker(d_p) - rank(d_{p-1}), computed by exact ranks.
inline int cohomology_dim(const Representation& rep, int p) {
  require(p >= 0 && p <= 2, ErrorCode::DegreeTooHigh,
          "cohomology computed for degrees 0..2");
  const int dim_cp = static_cast<int>(increasing_tuples(rep.algebra_dim(), p).size()) *
                     rep.module_dim();
  const int rank_p = differential_matrix(rep, p).rank();
  const int rank_pm1 = (p == 0) ? 0 : differential_matrix(rep, p - 1).rank();
  return dim_cp - rank_p - rank_pm1;
}

/// Nontrivial class blocking a coboundary equation: the input 2-cocycle is
/// returned as the class representative together with dim H^2.
struct Obstruction {
  Cochain representative;
  int obstruction_dim;
};

/// Solves d(phi) = psi for a 1-cochain phi, given a 2-cocycle psi.
/// Deterministic: the particular solution has all free variables zero.
inline std::variant<Cochain, Obstruction> solve_coboundary(const Cochain& psi) {
  require(psi.degree() == 2, ErrorCode::InvalidInput,
          "coboundary solve expects a 2-cochain");
  require(psi.differential().is_zero(), ErrorCode::NotACocycle,
          "right-hand side is not a cocycle");
  const RatMat d1 = differential_matrix(psi.rep(), 1);
  const auto x = solve_linear(d1, psi.flatten());
  if (!x.has_value())
    return Obstruction{psi, cohomology_dim(psi.rep(), 2)};
  return Cochain::from_flat(1, psi.rep(), *x);
}

}  // namespace levi
