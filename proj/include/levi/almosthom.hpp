#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/matgroup.hpp"

namespace levi {

/// Finite group as a multiplication table: table[g][h] = g*h. The table is
/// validated exhaustively (closure, associativity, identity, inverses).
class FiniteGroup {
 public:
  explicit FiniteGroup(std::vector<std::vector<int>> table)
      : table_(std::move(table)) {
    const int n = static_cast<int>(table_.size());
    require(n >= 1, ErrorCode::InvalidInput, "empty group table");
    for (const auto& row : table_) {
      require(static_cast<int>(row.size()) == n, ErrorCode::DimensionMismatch,
              "group table must be square");
      for (int v : row)
        require(v >= 0 && v < n, ErrorCode::InvalidInput,
                "group table entry out of range");
    }
    identity_ = -1;
    for (int e = 0; e < n; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g)
        ok = table_[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)] == g &&
             table_[static_cast<std::size_t>(g)][static_cast<std::size_t>(e)] == g;
      if (ok) {
        require(identity_ < 0, ErrorCode::InvalidInput,
                "group table has two identities");
        identity_ = e;
      }
    }
    require(identity_ >= 0, ErrorCode::InvalidInput,
            "group table has no identity");
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int g = 0; g < n; ++g) {
      for (int h = 0; h < n; ++h)
        if (mul(g, h) == identity_ && mul(h, g) == identity_) {
          require(inverse_[static_cast<std::size_t>(g)] < 0,
                  ErrorCode::InvalidInput, "group element has two inverses");
          inverse_[static_cast<std::size_t>(g)] = h;
        }
      require(inverse_[static_cast<std::size_t>(g)] >= 0,
              ErrorCode::InvalidInput, "group element has no inverse");
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          require(mul(mul(a, b), c) == mul(a, mul(b, c)),
                  ErrorCode::InvalidInput, "group table is not associative");
  }

  static FiniteGroup cyclic(int n) {
    require(n >= 1, ErrorCode::InvalidInput, "cyclic group order must be >= 1");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(n),
                                    std::vector<int>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i + j) % n;
    return FiniteGroup(std::move(t));
  }

  /// Quaternion group {1,-1,i,-i,j,-j,k,-k} via exact integer quaternions.
  static FiniteGroup quaternion() {
    // (w, x, y, z) components; elements listed as +-1, +-i, +-j, +-k.
    const std::array<std::array<int, 4>, 8> q = {{{1, 0, 0, 0},
                                                  {-1, 0, 0, 0},
                                                  {0, 1, 0, 0},
                                                  {0, -1, 0, 0},
                                                  {0, 0, 1, 0},
                                                  {0, 0, -1, 0},
                                                  {0, 0, 0, 1},
                                                  {0, 0, 0, -1}}};
    auto mulq = [](const std::array<int, 4>& a, const std::array<int, 4>& b) {
      return std::array<int, 4>{
          a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
    };
    std::map<std::array<int, 4>, int> index;
    for (int i = 0; i < 8; ++i) index[q[static_cast<std::size_t>(i)]] = i;
    std::vector<std::vector<int>> t(8, std::vector<int>(8));
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            index.at(mulq(q[static_cast<std::size_t>(a)],
                          q[static_cast<std::size_t>(b)]));
    return FiniteGroup(std::move(t));
  }

  int size() const { return static_cast<int>(table_.size()); }
  int identity() const { return identity_; }
  int mul(int a, int b) const {
    require(a >= 0 && a < size() && b >= 0 && b < size(),
            ErrorCode::IndexOutOfRange, "group element index out of range");
    return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  int inv(int a) const {
    require(a >= 0 && a < size(), ErrorCode::IndexOutOfRange,
            "group element index out of range");
    return inverse_[static_cast<std::size_t>(a)];
  }
  const std::vector<std::vector<int>>& table() const { return table_; }

  bool operator==(const FiniteGroup& o) const { return table_ == o.table_; }

 private:
  std::vector<std::vector<int>> table_;
  int identity_;
  std::vector<int> inverse_;
};

/// Map from a finite group into SO(n)/SU(n), not assumed multiplicative.
/// Every value must pass the target's element validation.
class AlmostHomomorphism {
 public:
  AlmostHomomorphism(FiniteGroup group, MatrixGroupTarget target,
                     std::vector<Matrix> values)
      : group_(std::move(group)), target_(std::move(target)),
        values_(std::move(values)) {
    require(values_.size() == static_cast<std::size_t>(group_.size()),
            ErrorCode::DimensionMismatch, "one matrix per group element");
    for (const auto& v : values_) target_.validate_element(v);
  }

  const FiniteGroup& group() const { return group_; }
  const MatrixGroupTarget& target() const { return target_; }
  const Matrix& value(int g) const {
    require(g >= 0 && g < group_.size(), ErrorCode::IndexOutOfRange,
            "group element index out of range");
    return values_[static_cast<std::size_t>(g)];
  }

  /// q = max over pairs of d(sigma(g) sigma(h), sigma(gh)).
  double defect() const {
    double q = 0.0;
    for (int g = 0; g < group_.size(); ++g)
      for (int h = 0; h < group_.size(); ++h)
        q = std::max(q, target_.distance(value(g) * value(h),
                                         value(group_.mul(g, h))));
    return q;
  }

  /// max over g of d(sigma(g), other(g)).
  double distance_to(const AlmostHomomorphism& o) const {
    require(group_ == o.group_ && target_ == o.target_,
            ErrorCode::AlgebraMismatch,
            "maps live over different groups or targets");
    double m = 0.0;
    for (int g = 0; g < group_.size(); ++g)
      m = std::max(m, target_.distance(value(g), o.value(g)));
    return m;
  }

  bool is_homomorphism(double tol) const { return defect() <= tol; }

 private:
  FiniteGroup group_;
  MatrixGroupTarget target_;
  std::vector<Matrix> values_;
};

/// One averaging sweep: sigma'(g) = intrinsic mean over h of
/// sigma(gh) sigma(h)^{-1}. Contracts the defect quadratically while the
/// defect stays small.
inline AlmostHomomorphism improve(const AlmostHomomorphism& sigma) {
  const FiniteGroup& gr = sigma.group();
  const MatrixGroupTarget& t = sigma.target();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(gr.size()));
  for (int g = 0; g < gr.size(); ++g) {
    std::vector<Matrix> pts;
    pts.reserve(static_cast<std::size_t>(gr.size()));
    for (int h = 0; h < gr.size(); ++h)
      pts.push_back(t.sanitize(sigma.value(gr.mul(g, h)) *
                               sigma.value(h).adjoint()));
    out.push_back(karcher_mean(pts, t));
  }
  return AlmostHomomorphism(gr, t, std::move(out));
}

struct HomAveragingResult {
  AlmostHomomorphism corrected;
  double initial_defect = 0.0;
  double final_defect = 0.0;
  double displacement = 0.0;   // max_g d(input(g), corrected(g))
  double displacement_bound = 0.0;  // 1.36 * initial defect
  int sweeps = 0;
};

/// Iterates `improve` until the defect drops below `tol`. Requires the
/// initial defect q <= pi/6; the corrected map stays within 1.36 q of the
/// input (asserted by callers per the underlying estimate).
inline HomAveragingResult average_to_homomorphism(
    const AlmostHomomorphism& sigma0, double tol = 1e-12,
    int max_sweeps = 50, bool force = false) {
  const double q0 = sigma0.defect();
  require(force || q0 <= std::numbers::pi / 6.0, ErrorCode::DefectTooLarge,
          "initial defect exceeds pi/6");
  AlmostHomomorphism sigma = sigma0;
  int sweeps = 0;
  double q = q0;
  while (q > tol) {
    require(sweeps < max_sweeps, ErrorCode::NoConvergence,
            "defect did not fall below tolerance");
    sigma = improve(sigma);
    q = sigma.defect();
    ++sweeps;
  }
  return {sigma, q0, q, sigma0.distance_to(sigma), 1.36 * q0, sweeps};
}

struct RepAveragingResult {
  std::vector<Matrix> corrected;
  double initial_defect = 0.0;   // operator-norm defect of the input
  double final_defect = 0.0;
  double displacement = 0.0;     // max_g ||input(g) - corrected(g)||_op
  int sweeps = 0;
};

inline double representation_defect(const FiniteGroup& gr,
                                    const std::vector<Matrix>& t) {
  double q = 0.0;
  for (int g = 0; g < gr.size(); ++g)
    for (int h = 0; h < gr.size(); ++h)
      q = std::max(q, op_norm(t[static_cast<std::size_t>(g)] *
                                  t[static_cast<std::size_t>(h)] -
                              t[static_cast<std::size_t>(gr.mul(g, h))]));
  return q;
}

/// Linear averaging sweep T'(g) = mean over h of T(gh) T(h)^{-1} applied to
/// an almost-representation by invertible complex matrices. Hypotheses
/// (checked): ||T(g)||, ||T(g)^{-1}|| <= K, eps <= 2^{-6}, and defect
/// <= eps (2K)^{-9}. The corrected family is a true representation within
/// eps of the input in operator norm.
inline RepAveragingResult average_to_representation(
    const FiniteGroup& gr, const std::vector<Matrix>& t0, double bound_k,
    double eps, double tol = 1e-12, int max_sweeps = 50, bool force = false) {
  require(t0.size() == static_cast<std::size_t>(gr.size()),
          ErrorCode::DimensionMismatch, "one matrix per group element");
  require(force || bound_k >= 1.0, ErrorCode::HypothesisViolated,
          "norm bound K must be at least 1");
  require(eps > 0.0, ErrorCode::HypothesisViolated, "eps must be positive");
  require(force || eps <= std::pow(2.0, -6.0), ErrorCode::HypothesisViolated,
          "eps must lie in (0, 2^-6]");
  const int dim = static_cast<int>(t0.front().rows());
  for (const auto& m : t0) {
    require(m.rows() == dim && m.cols() == dim, ErrorCode::DimensionMismatch,
            "values must be square matrices of one size");
    require(force || op_norm(m) <= bound_k, ErrorCode::HypothesisViolated,
            "a value exceeds the norm bound K");
    require(force || op_norm(m.inverse()) <= bound_k,
            ErrorCode::HypothesisViolated,
            "an inverse exceeds the norm bound K");
  }
  const double q0 = representation_defect(gr, t0);
  const double gate = eps * std::pow(2.0 * bound_k, -9.0);
  require(force || q0 <= gate, ErrorCode::HypothesisViolated,
          "defect exceeds eps (2K)^-9");

  std::vector<Matrix> t = t0;
  double q = q0;
  int sweeps = 0;
  while (q > tol) {
    require(sweeps < max_sweeps, ErrorCode::NoConvergence,
            "defect did not fall below tolerance");
    std::vector<Matrix> next(t.size(), Matrix::Zero(dim, dim));
    for (int g = 0; g < gr.size(); ++g) {
      Matrix acc = Matrix::Zero(dim, dim);
      for (int h = 0; h < gr.size(); ++h)
        acc += t[static_cast<std::size_t>(gr.mul(g, h))] *
               t[static_cast<std::size_t>(h)].inverse();
      next[static_cast<std::size_t>(g)] = acc / static_cast<double>(gr.size());
    }
    t = std::move(next);
    q = representation_defect(gr, t);
    ++sweeps;
  }
  double disp = 0.0;
  for (std::size_t g = 0; g < t.size(); ++g)
    disp = std::max(disp, op_norm(t0[g] - t[g]));
  return {t, q0, q, disp, sweeps};
}

}  // namespace levi
