// Regenerates the example corpus under data/. Deterministic: fixed seeds,
// raw mt19937 output mapping, 17-significant-digit CSV.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "levi/io.hpp"
#include "levi/normalform.hpp"
#include "levi/report.hpp"

using namespace levi;

namespace {

struct Rng {
  std::mt19937 g;
  explicit Rng(unsigned seed) : g(seed) {}
  double unit() { return std::ldexp(static_cast<double>(g()), -32); }
  double sym() { return 2.0 * unit() - 1.0; }
};

std::string out_dir;

void write_json(const std::string& name, const Json& j) {
  write_text_file(out_dir + "/" + name, j.dump(2) + "\n");
  std::printf("wrote %s/%s\n", out_dir.c_str(), name.c_str());
}

void write_matrix_csv(const std::string& name, const MatrixXd& m) {
  save_csv(out_dir + "/" + name, m);
  std::printf("wrote %s/%s\n", out_dir.c_str(), name.c_str());
}

TruncatedPolynomial var(int i, int n, int order) {
  return TruncatedPolynomial::variable(n, order, i);
}

PoissonStructure so3_poisson(int order) {
  PoissonStructure p(3, order);
  p.set_entry(0, 1, var(2, 3, order));
  p.set_entry(1, 2, var(0, 3, order));
  p.set_entry(0, 2, -var(1, 3, order));
  return p;
}

void poisson_files() {
  write_json("so3_linear.json", poisson_to_json(so3_poisson(6)));

  PoissonStructure pert = so3_poisson(6);
  pert.set_entry(0, 1, var(2, 3, 6) + var(2, 3, 6) * var(2, 3, 6));
  write_json("so3_perturbed.json", poisson_to_json(pert));

  PoissonStructure ab(2, 3);
  ab.set_entry(0, 1, var(0, 2, 3) * var(0, 2, 3));
  write_json("abelian_obstructed.json", poisson_to_json(ab));

  // pi12 = x3, pi23 = x1, pi13 = x1^2 violates Jacobi: the (1,2,3)
  // jacobiator is -2 x1 x3.
  PoissonStructure bad(3, 3);
  bad.set_entry(0, 1, var(2, 3, 3));
  bad.set_entry(1, 2, var(0, 3, 3));
  bad.set_entry(0, 2, var(0, 3, 3) * var(0, 3, 3));
  write_json("broken_jacobi.json", poisson_to_json(bad));
}

void lie_algebra_files() {
  write_json("so3_algebra.json", lie_algebra_to_json(LieAlgebra::so3()));
  write_json("solvable2.json",
             lie_algebra_to_json(
                 LieAlgebra::from_brackets(2, {{0, 1, 1, Rational(1)}})));
}

LieAlgebroid so3_action(int order) {
  const LieAlgebra g = LieAlgebra::so3();
  std::vector<RatMat> action;
  for (int i = 0; i < 3; ++i) {
    RatMat m(3, 3);
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) m.at(k, j) = -g.c(i, j, k);
    action.push_back(std::move(m));
  }
  return LieAlgebroid::action_algebroid(g, action, order);
}

void algebroid_files() {
  const LieAlgebroid a = so3_action(4);
  write_json("so3_action.json", algebroid_to_json(a));

  // Disturb by an order-4 frame change and coordinate change; the axioms
  // hold exactly because both are genuine changes of presentation.
  PolyMat t = poly_mat_identity(3, 3, 4);
  t[0][1] = t[0][1] + Rational(1, 2) * var(2, 3, 4);
  t[2][0] = t[2][0] + Rational(1, 3) * var(1, 3, 4) * var(1, 3, 4);
  std::vector<TruncatedPolynomial> chi{
      var(0, 3, 4),
      var(1, 3, 4) + Rational(1, 4) * var(0, 3, 4) * var(2, 3, 4),
      var(2, 3, 4)};
  const LieAlgebroid moved =
      a.change_frame(FrameChange(t)).change_coordinates(CoordinateChange(chi));
  write_json("so3_action_disturbed.json", algebroid_to_json(moved));
}

void group_files() {
  write_json("c3.json", finite_group_to_json(FiniteGroup::cyclic(3)));
  write_json("c4.json", finite_group_to_json(FiniteGroup::cyclic(4)));
  write_json("q8.json", finite_group_to_json(FiniteGroup::quaternion()));
}

Matrix so3_rot_z(double angle) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 0) = std::cos(angle);
  m(0, 1) = -std::sin(angle);
  m(1, 0) = std::sin(angle);
  m(1, 1) = std::cos(angle);
  return m;
}

Matrix random_so3_perturbation(Rng& rng, double scale) {
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  s(0, 1) = scale * rng.sym();
  s(0, 2) = scale * rng.sym();
  s(1, 2) = scale * rng.sym();
  s(1, 0) = -s(0, 1);
  s(2, 0) = -s(0, 2);
  s(2, 1) = -s(1, 2);
  Eigen::Matrix3d e = s.exp();
  return e.cast<std::complex<double>>();
}

void hom_files() {
  {
    const FiniteGroup c4 = FiniteGroup::cyclic(4);
    const MatrixGroupTarget target(GroupKind::SpecialOrthogonal, 3);
    Rng rng(20240811);
    std::vector<Matrix> values;
    for (int k = 0; k < 4; ++k)
      values.push_back(target.sanitize(
          so3_rot_z(k * std::numbers::pi / 2.0) *
          random_so3_perturbation(rng, 0.04)));
    const AlmostHomomorphism h(c4, target, values);
    write_json("c4_so3.json", hom_to_json(h));
  }
  {
    const FiniteGroup q8 = FiniteGroup::quaternion();
    const MatrixGroupTarget target(GroupKind::SpecialUnitary, 2);
    // Unit quaternion (w,x,y,z) as an SU(2) matrix.
    const std::array<std::array<int, 4>, 8> q = {{{1, 0, 0, 0},
                                                  {-1, 0, 0, 0},
                                                  {0, 1, 0, 0},
                                                  {0, -1, 0, 0},
                                                  {0, 0, 1, 0},
                                                  {0, 0, -1, 0},
                                                  {0, 0, 0, 1},
                                                  {0, 0, 0, -1}}};
    Rng rng(20240812);
    std::vector<Matrix> values;
    for (const auto& e : q) {
      Matrix m(2, 2);
      m(0, 0) = std::complex<double>(e[0], e[1]);
      m(0, 1) = std::complex<double>(e[2], e[3]);
      m(1, 0) = std::complex<double>(-e[2], e[3]);
      m(1, 1) = std::complex<double>(e[0], -e[1]);
      // su(2) direction i(a sigma_x + b sigma_y + c sigma_z), small angle.
      Matrix s(2, 2);
      const double a = 0.03 * rng.sym(), b = 0.03 * rng.sym(),
                   c = 0.03 * rng.sym();
      s(0, 0) = std::complex<double>(0, c);
      s(0, 1) = std::complex<double>(b, a);
      s(1, 0) = std::complex<double>(-b, a);
      s(1, 1) = std::complex<double>(0, -c);
      values.push_back(target.sanitize(m * s.exp()));
    }
    const AlmostHomomorphism h(q8, target, values);
    write_json("q8_su2.json", hom_to_json(h));
  }
}

void rep_files() {
  const FiniteGroup c3 = FiniteGroup::cyclic(3);
  const std::complex<double> omega =
      std::exp(std::complex<double>(0, 2.0 * std::numbers::pi / 3.0));
  Rng rng(20240813);
  std::vector<Matrix> values;
  for (int k = 0; k < 3; ++k) {
    Matrix d = Matrix::Identity(2, 2);
    d(1, 1) = std::pow(omega, k);
    Matrix e(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        e(r, c) = 3e-6 * std::complex<double>(rng.sym(), rng.sym());
    values.push_back(d * (Matrix::Identity(2, 2) + e));
  }
  Json j;
  j["dim"] = 2;
  j["values"] = rep_values_to_json(values);
  j["norm_bound"] = 1.01;
  j["eps"] = 0.015625;
  write_json("c3_rep.json", j);
}

Json euclidean_sidecar(int dim, const std::vector<Isometry>& group,
                       const char* topology) {
  Json amb;
  amb["kind"] = "R";
  amb["dim"] = dim;
  Json j;
  j["ambient"] = std::move(amb);
  j["topology"] = topology;
  Json g = Json::array();
  for (const auto& iso : group) g.push_back(isometry_to_json(iso));
  j["group"] = std::move(g);
  return j;
}

void submanifold_files() {
  const int n = 64;
  {
    // Unit circle offset along x; symmetry group {id, x -> -x}.
    MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * i / n;
      pts(i, 0) = std::cos(th) + 2e-5;
      pts(i, 1) = std::sin(th);
    }
    const auto curve =
        DiscretizedSubmanifold::closed_curve(AmbientKind::Euclidean, pts);
    write_matrix_csv("circle_offset.csv", submanifold_to_csv_matrix(curve));
    MatrixXd refl = MatrixXd::Identity(2, 2);
    refl(0, 0) = -1.0;
    write_json("circle_offset.json",
               euclidean_sidecar(
                   2,
                   {Isometry{MatrixXd::Identity(2, 2), VectorXd::Zero(2)},
                    Isometry{refl, VectorXd::Zero(2)}},
                   "closed-curve"));
  }
  {
    // Third-harmonic radial wobble; C4 rotation group.
    MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * i / n;
      const double r = 1.0 + 1e-5 * std::cos(3.0 * th);
      pts(i, 0) = r * std::cos(th);
      pts(i, 1) = r * std::sin(th);
    }
    const auto curve =
        DiscretizedSubmanifold::closed_curve(AmbientKind::Euclidean, pts);
    write_matrix_csv("circle_wobble.csv", submanifold_to_csv_matrix(curve));
    std::vector<Isometry> c4;
    for (int k = 0; k < 4; ++k) {
      const double a = k * std::numbers::pi / 2.0;
      MatrixXd rot(2, 2);
      rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
      c4.push_back(Isometry{rot, VectorXd::Zero(2)});
    }
    write_json("circle_wobble.json",
               euclidean_sidecar(2, c4, "closed-curve"));
  }
  {
    // Flat square patch with an odd interior bump; group {id, x -> -x}.
    const int m = 17;
    const double q = 1e-5;
    MatrixXd pts(m * m, 3), frames(m * m, 6);
    auto bump = [&](double x, double y) {
      const double bx = (1 - x * x) * (1 - x * x);
      const double by = (1 - y * y) * (1 - y * y);
      return q * bx * by * x;
    };
    auto bump_dx = [&](double x, double y) {
      const double bx = (1 - x * x) * (1 - x * x);
      const double by = (1 - y * y) * (1 - y * y);
      const double dbx = -4.0 * x * (1 - x * x);
      return q * by * (dbx * x + bx);
    };
    auto bump_dy = [&](double x, double y) {
      const double bx = (1 - x * x) * (1 - x * x);
      const double dby = -4.0 * y * (1 - y * y);
      return q * bx * dby * x;
    };
    for (int iu = 0; iu < m; ++iu)
      for (int iv = 0; iv < m; ++iv) {
        const double x = -1.0 + 2.0 * iu / (m - 1);
        const double y = -1.0 + 2.0 * iv / (m - 1);
        const int i = iu * m + iv;
        pts.row(i) << x, y, bump(x, y);
        VectorXd du(3), dv(3);
        du << 1, 0, bump_dx(x, y);
        dv << 0, 1, bump_dy(x, y);
        du.normalize();
        dv -= dv.dot(du) * du;
        dv.normalize();
        frames.row(i).segment(0, 3) = du.transpose();
        frames.row(i).segment(3, 3) = dv.transpose();
      }
    const DiscretizedSubmanifold patch(AmbientKind::Euclidean, Topology::Patch,
                                       pts, frames, m, m);
    write_matrix_csv("patch_bump.csv", submanifold_to_csv_matrix(patch));
    MatrixXd xflip = MatrixXd::Identity(3, 3);
    xflip(0, 0) = -1.0;
    Json sidecar = euclidean_sidecar(
        3,
        {Isometry{MatrixXd::Identity(3, 3), VectorXd::Zero(3)},
         Isometry{xflip, VectorXd::Zero(3)}},
        "patch");
    sidecar["grid"] = {m, m};
    write_json("patch_bump.json", sidecar);
  }
}

}  // namespace

int main(int argc, char** argv) {
  out_dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out_dir);
  poisson_files();
  lie_algebra_files();
  algebroid_files();
  group_files();
  hom_files();
  rep_files();
  submanifold_files();
  return 0;
}
