#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "levi/errors.hpp"
#include "levi/parallel.hpp"

namespace levi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class AmbientKind { Euclidean, Sphere };
enum class Topology { ClosedCurve, Patch };

/// Model-space helpers. Euclidean R^m uses m coordinates; the unit sphere
/// S^m sits in R^{m+1}, so its points carry m+1 coordinates.

inline double point_distance(AmbientKind kind, const VectorXd& x,
                             const VectorXd& y) {
  if (kind == AmbientKind::Euclidean) return (y - x).norm();
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  return std::acos(c);
}

/// Geodesic from x with initial velocity v, evaluated at time 1.
inline VectorXd exp_map(AmbientKind kind, const VectorXd& x,
                        const VectorXd& v) {
  if (kind == AmbientKind::Euclidean) return x + v;
  const double r = v.norm();
  if (r < 1e-300) return x;
  return std::cos(r) * x + (std::sin(r) / r) * v;
}

/// Initial velocity of the minimizing geodesic from x to y.
inline VectorXd log_map(AmbientKind kind, const VectorXd& x,
                        const VectorXd& y) {
  if (kind == AmbientKind::Euclidean) return y - x;
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  const double theta = std::acos(c);
  if (theta < 1e-9) {
    VectorXd d = y - x;
    return d - d.dot(x) * x;
  }
  return (theta / std::sin(theta)) * (y - c * x);
}

/// Parallel transport of a tangent vector at x to the point y along the
/// connecting geodesic.
inline VectorXd parallel_transport(AmbientKind kind, const VectorXd& x,
                                   const VectorXd& y, const VectorXd& v) {
  if (kind == AmbientKind::Euclidean) return v;
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  require(c > -1.0 + 1e-12, ErrorCode::LogUndefined,
          "transport between antipodal points is undefined");
  return v - (v.dot(y) / (1.0 + c)) * (x + y);
}

/// Rigid motion of the model space: x -> Qx + t in R^m (t = 0 on S^m,
/// where Q is (m+1) x (m+1) orthogonal).
struct Isometry {
  MatrixXd linear;
  VectorXd translation;  // zero-length or zero vector on the sphere

  VectorXd apply_point(const VectorXd& x) const {
    VectorXd y = linear * x;
    if (translation.size() > 0) y += translation;
    return y;
  }
  VectorXd apply_tangent(const VectorXd& v) const { return linear * v; }
};

/// Ambient model space plus a finite symmetry group acting by isometries.
/// The list must contain the identity and be closed under composition and
/// inversion, up to 1e-12 entrywise.
class AmbientSpace {
 public:
  static constexpr double group_tolerance = 1e-12;

  AmbientSpace(AmbientKind kind, int dim, std::vector<Isometry> group,
               double metric_scale = 1.0)
      : kind_(kind), dim_(dim), group_(std::move(group)),
        metric_scale_(metric_scale) {
    require(dim >= 1, ErrorCode::InvalidInput, "ambient dimension must be >= 1");
    require(metric_scale > 0, ErrorCode::InvalidInput,
            "metric scale must be positive");
    require(!group_.empty(), ErrorCode::InvalidInput, "empty isometry list");
    const int c = coord_dim();
    for (auto& g : group_) {
      require(g.linear.rows() == c && g.linear.cols() == c,
              ErrorCode::DimensionMismatch, "isometry matrix size mismatch");
      require((g.linear.transpose() * g.linear - MatrixXd::Identity(c, c))
                      .cwiseAbs()
                      .maxCoeff() <= group_tolerance,
              ErrorCode::InvalidInput, "isometry matrix is not orthogonal");
      if (kind_ == AmbientKind::Sphere)
        require(g.translation.size() == 0 || g.translation.norm() == 0.0,
                ErrorCode::InvalidInput,
                "sphere isometries cannot translate");
      if (g.translation.size() == 0) g.translation = VectorXd::Zero(c);
      require(g.translation.size() == c, ErrorCode::DimensionMismatch,
              "isometry translation size mismatch");
    }
    // Group table by matching composites against the list.
    const int n = static_cast<int>(group_.size());
    table_.assign(static_cast<std::size_t>(n),
                  std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Isometry ab{group_[static_cast<std::size_t>(a)].linear *
                        group_[static_cast<std::size_t>(b)].linear,
                    group_[static_cast<std::size_t>(a)].linear *
                            group_[static_cast<std::size_t>(b)].translation +
                        group_[static_cast<std::size_t>(a)].translation};
        const int idx = find(ab);
        require(idx >= 0, ErrorCode::InvalidInput,
                "isometry list is not closed under composition");
        table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = idx;
      }
    identity_ = find(Isometry{MatrixXd::Identity(c, c), VectorXd::Zero(c)});
    require(identity_ >= 0, ErrorCode::InvalidInput,
            "isometry list does not contain the identity");
    for (int a = 0; a < n; ++a) {
      bool has_inverse = false;
      for (int b = 0; b < n && !has_inverse; ++b)
        has_inverse = table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ==
                          identity_ &&
                      table_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] ==
                          identity_;
      require(has_inverse, ErrorCode::InvalidInput,
              "isometry list is not closed under inversion");
    }
  }

  AmbientKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Length of a coordinate tuple: m in R^m, m+1 on S^m.
  int coord_dim() const {
    return kind_ == AmbientKind::Euclidean ? dim_ : dim_ + 1;
  }
  double metric_scale() const { return metric_scale_; }
  int group_size() const { return static_cast<int>(group_.size()); }
  int identity_index() const { return identity_; }
  const Isometry& isometry(int g) const {
    require(g >= 0 && g < group_size(), ErrorCode::IndexOutOfRange,
            "isometry index out of range");
    return group_[static_cast<std::size_t>(g)];
  }
  int inverse_index(int g) const {
    require(g >= 0 && g < group_size(), ErrorCode::IndexOutOfRange,
            "isometry index out of range");
    for (int b = 0; b < group_size(); ++b)
      if (table_[static_cast<std::size_t>(g)][static_cast<std::size_t>(b)] ==
          identity_)
        return b;
    return -1;  // unreachable for a validated group
  }

  /// Index of a matching listed isometry, or -1.
  int find(const Isometry& iso) const {
    for (int i = 0; i < group_size(); ++i) {
      const auto& g = group_[static_cast<std::size_t>(i)];
      double diff = (g.linear - iso.linear).cwiseAbs().maxCoeff();
      if (iso.translation.size() > 0 && g.translation.size() > 0)
        diff = std::max(diff,
                        (g.translation - iso.translation).cwiseAbs().maxCoeff());
      else if (iso.translation.size() == 0 && g.translation.size() > 0)
        diff = std::max(diff, g.translation.cwiseAbs().maxCoeff());
      if (diff <= 10 * group_tolerance) return i;
    }
    return -1;
  }

 private:
  AmbientKind kind_;
  int dim_;
  std::vector<Isometry> group_;
  double metric_scale_;
  std::vector<std::vector<int>> table_;
  int identity_ = -1;
};

/// Interpolating cubic spline through n >= 3 cyclic knots at integer
/// parameters; C^2 across the wrap. Row i of `pts` is knot i.
class PeriodicCubicSpline {
 public:
  explicit PeriodicCubicSpline(const MatrixXd& pts) : p_(pts) {
    const int n = static_cast<int>(p_.rows());
    require(n >= 3, ErrorCode::InvalidInput,
            "periodic spline needs at least three knots");
    // Second-derivative moments: M_{i-1} + 4 M_i + M_{i+1} = 6 d2_i,
    // cyclic; solved by the Thomas algorithm plus a rank-one correction.
    MatrixXd rhs(n, p_.cols());
    for (int i = 0; i < n; ++i)
      rhs.row(i) = 6.0 * (p_.row((i + n - 1) % n) - 2.0 * p_.row(i) +
                          p_.row((i + 1) % n));
    m_ = solve_cyclic(rhs);
  }

  int knots() const { return static_cast<int>(p_.rows()); }
  int coord_dim() const { return static_cast<int>(p_.cols()); }

  VectorXd value(double u) const {
    const auto [i, j, t] = locate(u);
    const double s = 1.0 - t;
    return (m_.row(i) * (s * s * s / 6.0) + m_.row(j) * (t * t * t / 6.0) +
            (p_.row(i) - m_.row(i) / 6.0) * s +
            (p_.row(j) - m_.row(j) / 6.0) * t)
        .transpose();
  }

  VectorXd derivative(double u) const {
    const auto [i, j, t] = locate(u);
    const double s = 1.0 - t;
    return (-m_.row(i) * (s * s / 2.0) + m_.row(j) * (t * t / 2.0) +
            (p_.row(j) - p_.row(i)) - (m_.row(j) - m_.row(i)) / 6.0)
        .transpose();
  }

 private:
  std::tuple<int, int, double> locate(double u) const {
    const int n = knots();
    double w = std::fmod(u, static_cast<double>(n));
    if (w < 0) w += n;
    int i = static_cast<int>(std::floor(w));
    if (i >= n) i = 0;
    return {i, (i + 1) % n, w - i};
  }

  MatrixXd solve_cyclic(const MatrixXd& rhs) const {
    const int n = static_cast<int>(p_.rows());
    // System: 4 on the diagonal, 1 on both off-diagonals, 1 in the corners.
    const double gamma = -4.0;
    VectorXd diag = VectorXd::Constant(n, 4.0);
    diag(0) -= gamma;
    diag(n - 1) -= 1.0 / gamma;
    MatrixXd y = thomas(diag, rhs);
    MatrixXd u = MatrixXd::Zero(n, 1);
    u(0, 0) = gamma;
    u(n - 1, 0) = 1.0;
    MatrixXd z = thomas(diag, u);
    // v = (1, 0, ..., 0, 1/gamma)
    const double denom = 1.0 + z(0, 0) + z(n - 1, 0) / gamma;
    MatrixXd out(n, rhs.cols());
    for (int c = 0; c < rhs.cols(); ++c) {
      const double factor = (y(0, c) + y(n - 1, c) / gamma) / denom;
      out.col(c) = y.col(c) - factor * z.col(0);
    }
    return out;
  }

  static MatrixXd thomas(const VectorXd& diag, const MatrixXd& rhs) {
    const int n = static_cast<int>(diag.size());
    VectorXd cp(n);
    MatrixXd dp = rhs;
    cp(0) = 1.0 / diag(0);
    dp.row(0) /= diag(0);
    for (int i = 1; i < n; ++i) {
      const double m = diag(i) - cp(i - 1);
      cp(i) = 1.0 / m;
      dp.row(i) = (dp.row(i) - dp.row(i - 1)) / m;
    }
    for (int i = n - 2; i >= 0; --i) dp.row(i) -= cp(i) * dp.row(i + 1);
    return dp;
  }

  MatrixXd p_, m_;
};

/// Closed-curve interpolant in the model space: the cubic spline through
/// the samples, radially projected onto the sphere when applicable.
class CurveInterpolant {
 public:
  CurveInterpolant(AmbientKind kind, const MatrixXd& pts)
      : kind_(kind), spline_(pts) {}

  int knots() const { return spline_.knots(); }

  VectorXd value(double u) const {
    VectorXd v = spline_.value(u);
    if (kind_ == AmbientKind::Sphere) v.normalize();
    return v;
  }

  /// Unit tangent of the (projected) interpolant.
  VectorXd unit_tangent(double u) const {
    VectorXd d = spline_.derivative(u);
    if (kind_ == AmbientKind::Sphere) {
      VectorXd s = spline_.value(u);
      const double r = s.norm();
      VectorXd q = s / r;
      d = (d - d.dot(q) * q) / r;
    }
    d.normalize();
    return d;
  }

 private:
  AmbientKind kind_;
  PeriodicCubicSpline spline_;
};

/// Finite sample of a closed curve or a rectangular surface patch, with an
/// orthonormal tangent frame stored at every sample. Frames must agree
/// with finite-difference secants up to a mesh-scale bound.
class DiscretizedSubmanifold {
 public:
  DiscretizedSubmanifold(AmbientKind kind, Topology topology, MatrixXd points,
                         MatrixXd frames, int grid_u = 0, int grid_v = 0)
      : kind_(kind), topology_(topology), points_(std::move(points)),
        frames_(std::move(frames)), grid_u_(grid_u), grid_v_(grid_v) {
    const int s = sample_count();
    require(s >= 3, ErrorCode::InvalidInput, "need at least three samples");
    require(frames_.rows() == s, ErrorCode::DimensionMismatch,
            "one frame per sample required");
    require(frames_.cols() == intrinsic_dim() * coord_dim(),
            ErrorCode::DimensionMismatch, "frame width mismatch");
    if (topology_ == Topology::Patch) {
      require(kind_ == AmbientKind::Euclidean && coord_dim() == 3,
              ErrorCode::InvalidInput,
              "patches are supported for surfaces in R^3 only");
      require(grid_u_ >= 2 && grid_v_ >= 2 && grid_u_ * grid_v_ == s,
              ErrorCode::InvalidInput, "patch grid shape mismatch");
    }
    validate_frames();
    validate_tangency();
  }

  /// Closed curve with frames derived from the interpolating spline: the
  /// stored tangent at each knot is the normalized spline derivative.
  static DiscretizedSubmanifold closed_curve(AmbientKind kind,
                                             MatrixXd points) {
    MatrixXd pts = std::move(points);
    if (kind == AmbientKind::Sphere)
      for (int i = 0; i < pts.rows(); ++i) pts.row(i).normalize();
    CurveInterpolant interp(kind, pts);
    MatrixXd frames(pts.rows(), pts.cols());
    for (int i = 0; i < pts.rows(); ++i)
      frames.row(i) = interp.unit_tangent(static_cast<double>(i)).transpose();
    return DiscretizedSubmanifold(kind, Topology::ClosedCurve, std::move(pts),
                                  std::move(frames));
  }

  AmbientKind kind() const { return kind_; }
  Topology topology() const { return topology_; }
  int sample_count() const { return static_cast<int>(points_.rows()); }
  int coord_dim() const { return static_cast<int>(points_.cols()); }
  int intrinsic_dim() const {
    return topology_ == Topology::ClosedCurve ? 1 : 2;
  }
  int grid_u() const { return grid_u_; }
  int grid_v() const { return grid_v_; }
  const MatrixXd& points() const { return points_; }
  const MatrixXd& frames() const { return frames_; }

  VectorXd point(int i) const { return points_.row(i).transpose(); }

  /// j-th frame vector at sample i.
  VectorXd frame_vector(int i, int j) const {
    const int c = coord_dim();
    return frames_.row(i).segment(j * c, c).transpose();
  }

  /// Frame as a coord_dim x intrinsic_dim matrix with orthonormal columns.
  MatrixXd frame_matrix(int i) const {
    const int c = coord_dim();
    MatrixXd f(c, intrinsic_dim());
    for (int j = 0; j < intrinsic_dim(); ++j) f.col(j) = frame_vector(i, j);
    return f;
  }

  int grid_index(int iu, int iv) const { return iu * grid_v_ + iv; }

 private:
  void validate_frames() const {
    const int k = intrinsic_dim();
    for (int i = 0; i < sample_count(); ++i) {
      const MatrixXd f = frame_matrix(i);
      const double res =
          (f.transpose() * f - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
      require(res <= 1e-12, ErrorCode::InvalidInput,
              "frame is not orthonormal within tolerance");
      if (kind_ == AmbientKind::Sphere) {
        require(std::abs(point(i).norm() - 1.0) <= 1e-12,
                ErrorCode::InvalidInput, "sphere sample is not a unit vector");
        require((f.transpose() * point(i)).cwiseAbs().maxCoeff() <= 1e-12,
                ErrorCode::InvalidInput,
                "frame is not tangent to the sphere");
      }
    }
  }

  /// Frames must stay within angle ~5 h^2 of finite-difference secants;
  /// this rejects grossly wrong frames without penalizing curvature.
  void validate_tangency() const {
    auto check = [&](int i, VectorXd secant, double h) {
      if (kind_ == AmbientKind::Sphere) {
        const VectorXd x = point(i);
        secant -= secant.dot(x) * x;
      }
      const double len = secant.norm();
      if (len < 1e-300) return;
      secant /= len;
      const MatrixXd f = frame_matrix(i);
      const VectorXd res = secant - f * (f.transpose() * secant);
      require(res.norm() <= 5.0 * h * h + 1e-9, ErrorCode::InvalidInput,
              "stored frame deviates from the sample secants");
    };
    if (topology_ == Topology::ClosedCurve) {
      const int n = sample_count();
      for (int i = 0; i < n; ++i) {
        const VectorXd prev = point((i + n - 1) % n);
        const VectorXd next = point((i + 1) % n);
        const double h = std::max((point(i) - prev).norm(),
                                  (next - point(i)).norm());
        check(i, next - prev, h);
      }
    } else {
      for (int iu = 0; iu < grid_u_; ++iu)
        for (int iv = 0; iv < grid_v_; ++iv) {
          const int i = grid_index(iu, iv);
          const int ua = grid_index(std::max(iu - 1, 0), iv);
          const int ub = grid_index(std::min(iu + 1, grid_u_ - 1), iv);
          const int va = grid_index(iu, std::max(iv - 1, 0));
          const int vb = grid_index(iu, std::min(iv + 1, grid_v_ - 1));
          const double hu = (point(ub) - point(ua)).norm() /
                            std::max(1, (ub - ua) / grid_v_);
          const double hv = (point(vb) - point(va)).norm();
          check(i, point(ub) - point(ua), hu);
          check(i, point(vb) - point(va), hv);
        }
    }
  }

  AmbientKind kind_;
  Topology topology_;
  MatrixXd points_;
  MatrixXd frames_;
  int grid_u_, grid_v_;
};

/// Normal vector field over a discretized submanifold: one tangent-space
/// perpendicular vector of length < 1 per sample.
class NormalSection {
 public:
  NormalSection(DiscretizedSubmanifold base, MatrixXd values)
      : base_(std::move(base)), values_(std::move(values)) {
    require(values_.rows() == base_.sample_count() &&
                values_.cols() == base_.coord_dim(),
            ErrorCode::DimensionMismatch, "section shape mismatch");
    for (int i = 0; i < base_.sample_count(); ++i) {
      const VectorXd v = values_.row(i).transpose();
      require(v.norm() < 1.0, ErrorCode::InvalidInput,
              "section leaves the unit ball bundle");
      const MatrixXd f = base_.frame_matrix(i);
      require((f.transpose() * v).cwiseAbs().maxCoeff() <= 1e-10,
              ErrorCode::InvalidInput, "section is not normal to the frame");
      if (base_.kind() == AmbientKind::Sphere)
        require(std::abs(v.dot(base_.point(i))) <= 1e-10,
                ErrorCode::InvalidInput,
                "section is not tangent to the sphere");
    }
  }

  const DiscretizedSubmanifold& base() const { return base_; }
  const MatrixXd& values() const { return values_; }

 private:
  DiscretizedSubmanifold base_;
  MatrixXd values_;
};

namespace detail {

/// Root of f on the cyclic parameter range [0, n), found by a subsampled
/// scan plus bisection. Returns every simple root once.
inline std::vector<double> cyclic_roots(const std::function<double(double)>& f,
                                        int segments) {
  const int sub = 8;
  const int total = segments * sub;
  const double step = 1.0 / sub;
  std::vector<double> vals(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i)
    vals[static_cast<std::size_t>(i)] = f(i * step);
  std::vector<double> roots;
  auto push = [&](double u) {
    const double n = static_cast<double>(segments);
    double w = std::fmod(u, n);
    if (w < 0) w += n;
    for (double r : roots) {
      double d = std::abs(r - w);
      d = std::min(d, n - d);
      if (d < 1e-6) return;
    }
    roots.push_back(w);
  };
  for (int i = 0; i < total; ++i) {
    const double a = vals[static_cast<std::size_t>(i)];
    const double b = vals[static_cast<std::size_t>((i + 1) % total)];
    if (std::abs(a) <= 1e-14) {
      push(i * step);
      continue;
    }
    if (a * b < 0.0) {
      double lo = i * step, hi = (i + 1) * step;
      double flo = a;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      push(0.5 * (lo + hi));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

struct SectionData {
  MatrixXd values;         // per-sample normal vectors
  VectorXd lengths;        // geodesic lengths
  MatrixXd target_points;  // foot points on the other submanifold
  MatrixXd target_frames;  // orthonormal tangent frames at the foot points
};

/// Moller-Trumbore ray/triangle intersection; returns the parameter along
/// the (unit) direction or nothing.
inline bool ray_triangle(const VectorXd& o, const VectorXd& d,
                         const VectorXd& v0, const VectorXd& v1,
                         const VectorXd& v2, double& tau) {
  using V3 = Eigen::Vector3d;
  const V3 oo(o(0), o(1), o(2)), dd(d(0), d(1), d(2));
  const V3 a(v0(0), v0(1), v0(2)), b(v1(0), v1(1), v1(2)),
      c(v2(0), v2(1), v2(2));
  const V3 e1 = b - a, e2 = c - a;
  const V3 p = dd.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const V3 tv = oo - a;
  const double bu = tv.dot(p) * inv;
  if (bu < -1e-12 || bu > 1.0 + 1e-12) return false;
  const V3 q = tv.cross(e1);
  const double bv = dd.dot(q) * inv;
  if (bv < -1e-12 || bu + bv > 1.0 + 1e-12) return false;
  tau = e2.dot(q) * inv;
  return true;
}

inline SectionData express_impl(const DiscretizedSubmanifold& base,
                                const DiscretizedSubmanifold& other) {
  require(base.kind() == other.kind() &&
              base.coord_dim() == other.coord_dim() &&
              base.topology() == other.topology(),
          ErrorCode::DimensionMismatch,
          "submanifolds live in different model spaces");
  const int s = base.sample_count();
  const int c = base.coord_dim();
  const int k = base.intrinsic_dim();
  SectionData out;
  out.values.resize(s, c);
  out.lengths.resize(s);
  out.target_points.resize(s, c);
  out.target_frames.resize(s, k * c);

  if (base.topology() == Topology::ClosedCurve) {
    const CurveInterpolant interp(other.kind(), other.points());
    const int segs = other.sample_count();
    std::vector<std::string> errors(static_cast<std::size_t>(s));
    parallel_for(s, [&](int i) {
      const VectorXd x = base.point(i);
      const VectorXd t = base.frame_vector(i, 0);
      auto g = [&](double u) { return (interp.value(u) - x).dot(t); };
      std::vector<double> roots = cyclic_roots(g, segs);
      // Keep only the feet inside the unit ball around x.
      std::vector<std::pair<double, VectorXd>> feet;
      for (double u : roots) {
        VectorXd y = interp.value(u);
        if (point_distance(base.kind(), x, y) < 1.0)
          feet.emplace_back(u, std::move(y));
      }
      if (feet.size() != 1) {
        errors[static_cast<std::size_t>(i)] =
            feet.empty() ? "no foot point inside the ball bundle"
                         : "multiple foot points inside the ball bundle";
        return;
      }
      const double u = feet.front().first;
      const VectorXd& y = feet.front().second;
      VectorXd v = log_map(base.kind(), x, y);
      // Scrub float residue off the constraint directions.
      v -= v.dot(t) * t;
      if (base.kind() == AmbientKind::Sphere) v -= v.dot(x) * x;
      out.values.row(i) = v.transpose();
      out.lengths(i) = v.norm();
      out.target_points.row(i) = y.transpose();
      out.target_frames.row(i) = interp.unit_tangent(u).transpose();
    });
    for (const auto& e : errors)
      require(e.empty(), ErrorCode::NotAGraph, e);
  } else {
    // Surface patch in R^3: shoot the frame-normal ray into the other
    // patch's triangulated grid.
    const int nu = other.grid_u(), nv = other.grid_v();
    std::vector<std::string> errors(static_cast<std::size_t>(s));
    parallel_for(s, [&](int i) {
      const VectorXd x = base.point(i);
      const VectorXd f1 = base.frame_vector(i, 0);
      const VectorXd f2 = base.frame_vector(i, 1);
      VectorXd nu_vec(3);
      nu_vec << f1(1) * f2(2) - f1(2) * f2(1), f1(2) * f2(0) - f1(0) * f2(2),
          f1(0) * f2(1) - f1(1) * f2(0);
      nu_vec.normalize();
      struct Hit { double tau; int iu, iv, tri; };
      std::vector<Hit> hits;
      for (int iu = 0; iu + 1 < nu; ++iu)
        for (int iv = 0; iv + 1 < nv; ++iv) {
          const VectorXd p00 = other.point(other.grid_index(iu, iv));
          const VectorXd p10 = other.point(other.grid_index(iu + 1, iv));
          const VectorXd p01 = other.point(other.grid_index(iu, iv + 1));
          const VectorXd p11 = other.point(other.grid_index(iu + 1, iv + 1));
          double tau;
          if (ray_triangle(x, nu_vec, p00, p10, p11, tau) &&
              std::abs(tau) < 1.0)
            hits.push_back({tau, iu, iv, 0});
          if (ray_triangle(x, nu_vec, p00, p11, p01, tau) &&
              std::abs(tau) < 1.0)
            hits.push_back({tau, iu, iv, 1});
        }
      // Hits on shared edges or vertices appear once per facet.
      std::vector<Hit> unique;
      for (const auto& h : hits) {
        bool dup = false;
        for (const auto& u2 : unique)
          if (std::abs(u2.tau - h.tau) < 1e-9) { dup = true; break; }
        if (!dup) unique.push_back(h);
      }
      if (unique.size() != 1) {
        errors[static_cast<std::size_t>(i)] =
            unique.empty() ? "no foot point inside the ball bundle"
                           : "multiple foot points inside the ball bundle";
        return;
      }
      const Hit h = unique.front();
      out.values.row(i) = (h.tau * nu_vec).transpose();
      out.lengths(i) = std::abs(h.tau);
      out.target_points.row(i) = (x + h.tau * nu_vec).transpose();
      const VectorXd p00 = other.point(other.grid_index(h.iu, h.iv));
      const VectorXd p10 = other.point(other.grid_index(h.iu + 1, h.iv));
      const VectorXd p01 = other.point(other.grid_index(h.iu, h.iv + 1));
      const VectorXd p11 = other.point(other.grid_index(h.iu + 1, h.iv + 1));
      VectorXd e1 = (h.tri == 0 ? p10 : p11) - p00;
      VectorXd e2 = (h.tri == 0 ? p11 : p01) - p00;
      e1.normalize();
      e2 -= e2.dot(e1) * e1;
      e2.normalize();
      out.target_frames.row(i).segment(0, 3) = e1.transpose();
      out.target_frames.row(i).segment(3, 3) = e2.transpose();
    });
    for (const auto& e : errors)
      require(e.empty(), ErrorCode::NotAGraph, e);
  }
  return out;
}

/// Replaces each curve sample by the mean of its matched group orbit.
/// Index matching uses nearest neighbors; when it is unambiguous this
/// makes the sample set exactly symmetric, so interpolation errors cancel
/// between a curve and its translates. Returns the input unchanged when
/// the matching is ambiguous.
inline MatrixXd symmetrize_sampling(const MatrixXd& pts, AmbientKind kind,
                                    const AmbientSpace& ambient) {
  const int s = static_cast<int>(pts.rows());
  double min_gap = 1e300;
  for (int i = 0; i < s; ++i)
    min_gap = std::min(min_gap, point_distance(kind, pts.row(i).transpose(),
                                               pts.row((i + 1) % s).transpose()));
  std::vector<std::vector<int>> match(
      static_cast<std::size_t>(ambient.group_size()));
  for (int g = 0; g < ambient.group_size(); ++g) {
    auto& sigma = match[static_cast<std::size_t>(g)];
    sigma.assign(static_cast<std::size_t>(s), -1);
    std::vector<char> used(static_cast<std::size_t>(s), 0);
    for (int i = 0; i < s; ++i) {
      const VectorXd y =
          ambient.isometry(g).apply_point(pts.row(i).transpose());
      int best = -1;
      double best_d = 1e300;
      for (int j = 0; j < s; ++j) {
        const double d = point_distance(kind, y, pts.row(j).transpose());
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best_d > 0.45 * min_gap || used[static_cast<std::size_t>(best)])
        return pts;
      used[static_cast<std::size_t>(best)] = 1;
      sigma[static_cast<std::size_t>(i)] = best;
    }
  }
  MatrixXd out(s, pts.cols());
  for (int i = 0; i < s; ++i) {
    const VectorXd x = pts.row(i).transpose();
    VectorXd acc = VectorXd::Zero(pts.cols());
    for (int g = 0; g < ambient.group_size(); ++g) {
      const int gi = ambient.inverse_index(g);
      const int j = match[static_cast<std::size_t>(g)][static_cast<std::size_t>(i)];
      const VectorXd z =
          ambient.isometry(gi).apply_point(pts.row(j).transpose());
      acc += log_map(kind, x, z);
    }
    acc /= static_cast<double>(ambient.group_size());
    out.row(i) = exp_map(kind, x, acc).transpose();
  }
  return out;
}

}  // namespace detail

/// Writes `other` as a normal section over `base`: for every sample the
/// unique foot point of `other` on the normal slice within the unit ball.
inline NormalSection express_as_section(const DiscretizedSubmanifold& base,
                                        const DiscretizedSubmanifold& other) {
  detail::SectionData d = detail::express_impl(base, other);
  return NormalSection(base, std::move(d.values));
}

/// C^1 closeness of `other` seen as a graph over `base`: the larger of the
/// scaled geodesic section length and the largest principal angle between
/// the base frame and the transported target tangent plane.
inline double c1_distance(const DiscretizedSubmanifold& base,
                          const DiscretizedSubmanifold& other,
                          double metric_scale = 1.0) {
  const detail::SectionData d = detail::express_impl(base, other);
  const int k = base.intrinsic_dim();
  const int c = base.coord_dim();
  double worst = 0.0;
  for (int i = 0; i < base.sample_count(); ++i) {
    double a = metric_scale * d.lengths(i);
    MatrixXd g(c, k);
    for (int j = 0; j < k; ++j) {
      VectorXd v = d.target_frames.row(i).segment(j * c, c).transpose();
      v = parallel_transport(base.kind(), d.target_points.row(i).transpose(),
                             base.point(i), v);
      g.col(j) = v;
    }
    // Re-orthonormalize after transport to keep angles well defined.
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < j; ++l) g.col(j) -= g.col(j).dot(g.col(l)) * g.col(l);
      g.col(j).normalize();
    }
    // Largest principal angle, in the atan2 form that stays accurate for
    // both nearly aligned and nearly perpendicular frames.
    const MatrixXd f = base.frame_matrix(i);
    const MatrixXd overlap = f.transpose() * g;
    const double cosv =
        Eigen::JacobiSVD<MatrixXd>(overlap).singularValues().minCoeff();
    const double sinv = Eigen::JacobiSVD<MatrixXd>(g - f * overlap)
                            .singularValues()
                            .maxCoeff();
    a = std::max(a, std::atan2(sinv, std::max(cosv, 0.0)));
    worst = std::max(worst, a);
  }
  return worst;
}

/// Image of the submanifold under a listed isometry; frames move by the
/// differential. The isometry must belong to the ambient group.
inline DiscretizedSubmanifold translate(const DiscretizedSubmanifold& n,
                                        const AmbientSpace& ambient,
                                        const Isometry& iso) {
  require(ambient.kind() == n.kind() && ambient.coord_dim() == n.coord_dim(),
          ErrorCode::DimensionMismatch,
          "submanifold does not live in this ambient space");
  require(ambient.find(iso) >= 0, ErrorCode::UnknownIsometry,
          "isometry is not in the ambient group");
  const int s = n.sample_count();
  const int c = n.coord_dim();
  const int k = n.intrinsic_dim();
  MatrixXd pts(s, c), frames(s, k * c);
  for (int i = 0; i < s; ++i) {
    pts.row(i) = iso.apply_point(n.point(i)).transpose();
    for (int j = 0; j < k; ++j)
      frames.row(i).segment(j * c, c) =
          iso.apply_tangent(n.frame_vector(i, j)).transpose();
  }
  return DiscretizedSubmanifold(n.kind(), n.topology(), std::move(pts),
                                std::move(frames), n.grid_u(), n.grid_v());
}

inline DiscretizedSubmanifold translate(const DiscretizedSubmanifold& n,
                                        const AmbientSpace& ambient, int g) {
  return translate(n, ambient, ambient.isometry(g));
}

struct SubmanifoldAverage {
  DiscretizedSubmanifold invariant;
  double epsilon = 0.0;         // max over the group of c1(N, gN)
  double final_residual = 0.0;  // same quantity for the result
  double distance_moved = 0.0;  // c1(N, result)
  double displacement_bound = 0.0;  // 136 sqrt(epsilon)
  int iterations = 0;
};

/// Averages a nearly invariant submanifold over the ambient group by
/// iterating exp of the mean normal section until the invariance residual
/// falls below `tol`. Requires epsilon < 1/20000 unless forced.
inline SubmanifoldAverage average_submanifold(const DiscretizedSubmanifold& n,
                                              const AmbientSpace& ambient,
                                              double tol = 1e-10,
                                              int max_iter = 100,
                                              bool force = false) {
  const double scale = ambient.metric_scale();
  auto residual_of = [&](const DiscretizedSubmanifold& m) {
    double r = 0.0;
    for (int g = 0; g < ambient.group_size(); ++g)
      r = std::max(r, c1_distance(m, translate(m, ambient, g), scale));
    return r;
  };
  const double eps = residual_of(n);
  require(force || eps < 1.0 / 20000.0, ErrorCode::HypothesisViolated,
          "invariance defect is not below 1/20000");

  DiscretizedSubmanifold cur = n;
  int iters = 0;
  double res = eps;
  while (res > tol) {
    require(iters < max_iter, ErrorCode::NoConvergence,
            "invariance residual did not fall below tolerance");
    const int s = cur.sample_count();
    const int c = cur.coord_dim();
    MatrixXd mean = MatrixXd::Zero(s, c);
    for (int g = 0; g < ambient.group_size(); ++g) {
      const detail::SectionData d =
          detail::express_impl(cur, translate(cur, ambient, g));
      mean += d.values;
    }
    mean /= static_cast<double>(ambient.group_size());
    MatrixXd pts(s, c);
    for (int i = 0; i < s; ++i)
      pts.row(i) =
          exp_map(cur.kind(), cur.point(i), mean.row(i).transpose())
              .transpose();
    if (cur.topology() == Topology::ClosedCurve) {
      pts = detail::symmetrize_sampling(pts, cur.kind(), ambient);
      cur = DiscretizedSubmanifold::closed_curve(cur.kind(), std::move(pts));
    } else {
      // Rebuild patch frames from grid finite differences.
      const int nu = cur.grid_u(), nv = cur.grid_v();
      MatrixXd frames(s, 2 * c);
      for (int iu = 0; iu < nu; ++iu)
        for (int iv = 0; iv < nv; ++iv) {
          const int i = cur.grid_index(iu, iv);
          const int ua = cur.grid_index(std::max(iu - 1, 0), iv);
          const int ub = cur.grid_index(std::min(iu + 1, nu - 1), iv);
          const int va = cur.grid_index(iu, std::max(iv - 1, 0));
          const int vb = cur.grid_index(iu, std::min(iv + 1, nv - 1));
          VectorXd du = (pts.row(ub) - pts.row(ua)).transpose();
          VectorXd dv = (pts.row(vb) - pts.row(va)).transpose();
          du.normalize();
          dv -= dv.dot(du) * du;
          dv.normalize();
          frames.row(i).segment(0, c) = du.transpose();
          frames.row(i).segment(c, c) = dv.transpose();
        }
      cur = DiscretizedSubmanifold(cur.kind(), Topology::Patch, std::move(pts),
                                   std::move(frames), nu, nv);
    }
    res = residual_of(cur);
    ++iters;
  }
  const double moved = c1_distance(n, cur, scale);
  return {cur, eps, res, moved, 136.0 * std::sqrt(eps), iters};
}

}  // namespace levi
