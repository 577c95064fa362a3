#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>
#include <random>

#include "levi/matgroup.hpp"

using namespace levi;
using Catch::Matchers::WithinAbs;

namespace {

Matrix rot2(double a) {
  Matrix m(2, 2);
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

Matrix rot3z(double a) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

// Random element of the tangent algebra: skew (SO) or skew-Hermitian
// traceless (SU).
Matrix random_tangent(std::mt19937& gen, const MatrixGroupTarget& t,
                      double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m = Matrix::Zero(t.dim, t.dim);
  if (t.kind == GroupKind::SpecialOrthogonal) {
    for (int i = 0; i < t.dim; ++i)
      for (int j = i + 1; j < t.dim; ++j) {
        m(i, j) = u(gen);
        m(j, i) = -m(i, j);
      }
  } else {
    for (int i = 0; i < t.dim; ++i)
      for (int j = i + 1; j < t.dim; ++j) {
        m(i, j) = std::complex<double>(u(gen), u(gen));
        m(j, i) = -std::conj(m(i, j));
      }
    std::complex<double> tr(0.0, 0.0);
    for (int i = 0; i < t.dim - 1; ++i) {
      m(i, i) = std::complex<double>(0.0, u(gen));
      tr += m(i, i);
    }
    m(t.dim - 1, t.dim - 1) = -tr;
  }
  return m;
}

}  // namespace

TEST_CASE("element validation enforces the group laws", "[matgroup]") {
  const MatrixGroupTarget so3{GroupKind::SpecialOrthogonal, 3};
  CHECK_NOTHROW(so3.validate_element(rot3z(0.7)));
  CHECK_NOTHROW(so3.validate_element(Matrix::Identity(3, 3)));

  Matrix refl = Matrix::Identity(3, 3);
  refl(2, 2) = -1.0;  // determinant -1
  CHECK_THROWS_AS(so3.validate_element(refl), Error);

  Matrix scaled = 1.1 * Matrix::Identity(3, 3);
  CHECK_THROWS_AS(so3.validate_element(scaled), Error);

  Matrix complex_entry = Matrix::Identity(3, 3);
  complex_entry(0, 0) = std::complex<double>(0.0, 1.0);
  CHECK_THROWS_AS(so3.validate_element(complex_entry), Error);

  const MatrixGroupTarget su2{GroupKind::SpecialUnitary, 2};
  Matrix u(2, 2);
  const double c = std::cos(0.4), s = std::sin(0.4);
  u << std::complex<double>(c, s * 0.0), std::complex<double>(0.0, s),
      std::complex<double>(0.0, s), std::complex<double>(c, 0.0);
  CHECK_NOTHROW(su2.validate_element(u));
}

TEST_CASE("log and exp invert each other near the identity", "[matgroup]") {
  std::mt19937 gen(61);
  for (const auto kind :
       {GroupKind::SpecialOrthogonal, GroupKind::SpecialUnitary}) {
    const MatrixGroupTarget t{kind, 3};
    for (int trial = 0; trial < 8; ++trial) {
      const Matrix v = random_tangent(gen, t, 0.4);
      const Matrix g = t.exp(v);
      CHECK_NOTHROW(t.validate_element(g));
      CHECK((t.log(g) - v).norm() < 1e-12);
    }
  }
}

TEST_CASE("the log refuses the cut locus", "[matgroup]") {
  const MatrixGroupTarget so2{GroupKind::SpecialOrthogonal, 2};
  try {
    so2.log(rot2(std::numbers::pi));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LogUndefined);
  }
  CHECK_NOTHROW(so2.log(rot2(3.0)));
}

TEST_CASE("rotation distance is proportional to the angle gap", "[matgroup]") {
  const MatrixGroupTarget plain{GroupKind::SpecialOrthogonal, 2, 1.0};
  CHECK_THAT(plain.distance(rot2(0.3), rot2(0.41)),
             WithinAbs(std::numbers::sqrt2 * 0.11, 1e-13));
  // The default scale doubles the constant: sqrt2 * sqrt2 = 2.
  const MatrixGroupTarget scaled{GroupKind::SpecialOrthogonal, 2};
  CHECK_THAT(scaled.distance(rot2(0.3), rot2(0.41)), WithinAbs(0.22, 1e-13));
}

TEST_CASE("distance is bi-invariant", "[matgroup]") {
  std::mt19937 gen(62);
  const MatrixGroupTarget t{GroupKind::SpecialUnitary, 2};
  for (int trial = 0; trial < 6; ++trial) {
    const Matrix a = t.exp(random_tangent(gen, t, 0.5));
    const Matrix b = t.exp(random_tangent(gen, t, 0.5));
    const Matrix g = t.exp(random_tangent(gen, t, 1.0));
    const double d = t.distance(a, b);
    CHECK_THAT(t.distance(g * a, g * b), WithinAbs(d, 1e-10));
    CHECK_THAT(t.distance(a * g, b * g), WithinAbs(d, 1e-10));
    CHECK_THAT(t.distance(b, a), WithinAbs(d, 1e-10));
  }
}

TEST_CASE("the scale constant makes the bracket submultiplicative",
          "[matgroup]") {
  std::mt19937 gen(63);
  const MatrixGroupTarget t{GroupKind::SpecialUnitary, 2};
  bool violated_at_unit_scale = false;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix v = random_tangent(gen, t, 1.0);
    const Matrix w = random_tangent(gen, t, 1.0);
    const Matrix vw = v * w - w * v;
    CHECK(t.tangent_norm(vw) <= t.tangent_norm(v) * t.tangent_norm(w) + 1e-12);
    if (vw.norm() > v.norm() * w.norm() + 1e-12)
      violated_at_unit_scale = true;
  }
  // Without the sqrt2 factor the inequality genuinely fails.
  CHECK(violated_at_unit_scale);
}

TEST_CASE("projection lands on the nearest rotation", "[matgroup]") {
  const MatrixGroupTarget so3{GroupKind::SpecialOrthogonal, 3};
  std::mt19937 gen(64);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  Matrix noisy = rot3z(0.8);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) noisy(i, j) += u(gen);
  const Matrix p = so3.project(noisy);
  CHECK_NOTHROW(so3.validate_element(p));
  CHECK(so3.distance(p, rot3z(0.8)) < 0.2);

  Matrix reflected = Matrix::Identity(3, 3);
  reflected(2, 2) = -1.0;
  const Matrix q = so3.project(reflected);
  CHECK_NOTHROW(so3.validate_element(q));
}

TEST_CASE("the mean of one or two rotations is explicit", "[matgroup]") {
  const MatrixGroupTarget so2{GroupKind::SpecialOrthogonal, 2};
  const Matrix a = rot2(0.2);
  CHECK(so2.distance(karcher_mean({a}, so2), a) < 1e-13);
  const Matrix mid = karcher_mean({rot2(0.2), rot2(0.6)}, so2);
  CHECK(so2.distance(mid, rot2(0.4)) < 1e-12);
}

TEST_CASE("the mean is permutation invariant and first-order critical",
          "[matgroup]") {
  std::mt19937 gen(65);
  const MatrixGroupTarget t{GroupKind::SpecialUnitary, 2};
  std::vector<Matrix> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(t.exp(random_tangent(gen, t, 0.4)));

  const Matrix m = karcher_mean(pts, t);
  std::vector<Matrix> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  CHECK(t.distance(m, karcher_mean(shuffled, t)) < 1e-13);

  // Critical point: the tangent updates sum to zero at the mean.
  Matrix grad = Matrix::Zero(2, 2);
  for (const auto& p : pts) grad += t.log(m.adjoint() * p);
  CHECK(grad.norm() < 1e-13);
}

TEST_CASE("the mean respects left translation", "[matgroup]") {
  std::mt19937 gen(66);
  const MatrixGroupTarget t{GroupKind::SpecialOrthogonal, 3};
  std::vector<Matrix> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(t.exp(random_tangent(gen, t, 0.3)));
  const Matrix g = rot3z(1.1);
  std::vector<Matrix> moved;
  for (const auto& p : pts) moved.push_back(g * p);
  CHECK(t.distance(karcher_mean(moved, t), g * karcher_mean(pts, t)) < 1e-12);
}

TEST_CASE("widely spread point sets are refused", "[matgroup]") {
  const MatrixGroupTarget so2{GroupKind::SpecialOrthogonal, 2};
  try {
    karcher_mean({rot2(0.0), rot2(2.0)}, so2);  // sqrt2 * 2 > pi/2
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpreadTooLarge);
  }
}
