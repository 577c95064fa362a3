#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <numbers>
#include <vector>

#include "levi/errors.hpp"

namespace levi {

using Matrix = Eigen::MatrixXcd;

enum class GroupKind { SpecialOrthogonal, SpecialUnitary };

inline const char* to_string(GroupKind k) {
  return k == GroupKind::SpecialOrthogonal ? "SO" : "SU";
}

/// Largest singular value.
inline double op_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Compact matrix group SO(dim) or SU(dim) with the bi-invariant metric
/// d(a, b) = metric_scale * ||log(a^{-1} b)||_F. The default scale sqrt(2)
/// makes the commutator of unit tangents again have norm at most one, and
/// any scale >= 1 keeps one-parameter charts injective below angle pi.
struct MatrixGroupTarget {
  GroupKind kind;
  int dim;
  double metric_scale = std::numbers::sqrt2;

  static constexpr double unit_tolerance = 1e-12;
  // Principal logs are rejected this close to the cut locus.
  static constexpr double log_angle_margin = 1e-6;

  bool operator==(const MatrixGroupTarget& o) const {
    return kind == o.kind && dim == o.dim && metric_scale == o.metric_scale;
  }

  Matrix identity() const { return Matrix::Identity(dim, dim); }

  /// Unitarity/orthogonality and determinant residuals against tolerance.
  void validate_element(const Matrix& m) const {
    require(m.rows() == dim && m.cols() == dim, ErrorCode::DimensionMismatch,
            "group element has wrong size");
    const double unit_res = (m.adjoint() * m - identity()).norm();
    require(unit_res <= unit_tolerance, ErrorCode::InvalidInput,
            "matrix is not unitary within tolerance");
    const std::complex<double> det = m.determinant();
    require(std::abs(det - std::complex<double>(1.0, 0.0)) <= 1e-10,
            ErrorCode::InvalidInput, "matrix determinant is not 1");
    if (kind == GroupKind::SpecialOrthogonal)
      require(m.imag().norm() <= unit_tolerance, ErrorCode::InvalidInput,
              "special orthogonal element must be real");
  }

  /// Strips float noise that the group structure forbids: real part for
  /// SO, exact unitarity is left to the caller's tolerance.
  Matrix sanitize(const Matrix& m) const {
    if (kind == GroupKind::SpecialOrthogonal)
      return m.real().cast<std::complex<double>>();
    return m;
  }

  /// Principal logarithm; LogUndefined when an eigenvalue angle reaches
  /// pi - margin (the cut locus of the exponential chart).
  Matrix log(const Matrix& m) const {
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    require(es.info() == Eigen::Success, ErrorCode::LogUndefined,
            "eigenvalue computation failed");
    double max_angle = 0.0;
    for (int i = 0; i < dim; ++i)
      max_angle = std::max(max_angle, std::abs(std::arg(es.eigenvalues()(i))));
    require(max_angle < std::numbers::pi - log_angle_margin,
            ErrorCode::LogUndefined,
            "matrix lies too close to the logarithm cut locus");
    Matrix l = m.log();
    // Project to the skew part to suppress numerical drift off the algebra.
    return 0.5 * (l - l.adjoint().eval());
  }

  Matrix exp(const Matrix& x) const { return sanitize(x.exp()); }

  double tangent_norm(const Matrix& x) const {
    return metric_scale * x.norm();
  }

  double distance(const Matrix& a, const Matrix& b) const {
    return tangent_norm(log(a.adjoint() * b));
  }

  /// Nearest group element (polar projection via SVD).
  Matrix project(const Matrix& m) const {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU() * svd.matrixV().adjoint();
    // Fix the determinant phase so the result lands in the special group.
    std::complex<double> det = u.determinant();
    if (std::abs(det - std::complex<double>(1.0, 0.0)) > 1e-14) {
      const std::complex<double> phase = std::pow(det, -1.0 / dim);
      u *= phase;
      if (kind == GroupKind::SpecialOrthogonal && u.imag().norm() > 1e-10) {
        // A real matrix with det -1 cannot be phased into SO; flip the
        // last column of U instead.
        Matrix u2 = svd.matrixU();
        u2.col(dim - 1) *= -1.0;
        u = u2 * svd.matrixV().adjoint();
      }
    }
    return sanitize(u);
  }
};

/// Intrinsic (Karcher) mean by fixed-point iteration started at the first
/// point. Requires every point within distance pi/2 of the first; stops
/// when the update tangent norm drops below `tol`.
inline Matrix karcher_mean(const std::vector<Matrix>& points,
                           const MatrixGroupTarget& target,
                           double tol = 1e-14, int max_iter = 200) {
  require(!points.empty(), ErrorCode::InvalidInput,
          "mean of an empty point set");
  const double half_pi = std::numbers::pi / 2.0;
  for (const auto& p : points)
    require(target.distance(points.front(), p) <= half_pi,
            ErrorCode::SpreadTooLarge,
            "point spread exceeds the pi/2 convergence ball");
  Matrix mu = points.front();
  for (int it = 0; it < max_iter; ++it) {
    Matrix t = Matrix::Zero(target.dim, target.dim);
    for (const auto& p : points) t += target.log(mu.adjoint() * p);
    t /= static_cast<double>(points.size());
    if (target.tangent_norm(t) < tol) return mu;
    mu = target.sanitize(mu * target.exp(t));
  }
  fail(ErrorCode::NoConvergence, "mean iteration did not settle");
}

}  // namespace levi
