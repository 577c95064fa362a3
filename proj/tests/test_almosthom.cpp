#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "levi/almosthom.hpp"

using namespace levi;
using Catch::Matchers::WithinAbs;

namespace {

Matrix rot2(double a) {
  Matrix m(2, 2);
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

// Exact C4 -> SO(2) homomorphism sending the generator to a quarter turn,
// each value perturbed by an extra rotation.
AlmostHomomorphism perturbed_c4(const std::vector<double>& noise,
                                double metric_scale = 1.0) {
  const FiniteGroup c4 = FiniteGroup::cyclic(4);
  const MatrixGroupTarget t{GroupKind::SpecialOrthogonal, 2, metric_scale};
  std::vector<Matrix> vals;
  for (int k = 0; k < 4; ++k)
    vals.push_back(rot2(k * std::numbers::pi / 2.0 +
                        noise[static_cast<std::size_t>(k)]));
  return AlmostHomomorphism(c4, t, std::move(vals));
}

}  // namespace

TEST_CASE("group tables are validated", "[almosthom]") {
  const FiniteGroup c4 = FiniteGroup::cyclic(4);
  CHECK(c4.size() == 4);
  CHECK(c4.identity() == 0);
  CHECK(c4.mul(1, 3) == 0);
  CHECK(c4.inv(3) == 1);

  const FiniteGroup q8 = FiniteGroup::quaternion();
  CHECK(q8.size() == 8);
  // i * j = k and j * i = -k in the listed order 1,-1,i,-i,j,-j,k,-k.
  CHECK(q8.mul(2, 4) == 6);
  CHECK(q8.mul(4, 2) == 7);

  // A table with a row that is not a permutation is not a group.
  CHECK_THROWS_AS(FiniteGroup({{0, 1}, {1, 1}}), Error);
  // Associativity failure: a Latin square that is not a group.
  CHECK_THROWS_AS(FiniteGroup({{0, 1, 2, 3, 4},
                               {1, 0, 3, 4, 2},
                               {2, 4, 0, 1, 3},
                               {3, 2, 4, 0, 1},
                               {4, 3, 1, 2, 0}}),
                  Error);
}

TEST_CASE("defect vanishes exactly for true homomorphisms", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.0, 0.0, 0.0});
  CHECK(sigma.defect() < 1e-14);
  CHECK(sigma.is_homomorphism(1e-14));
}

TEST_CASE("small perturbations give proportional defects", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.03, -0.05, 0.02});
  // All perturbing angles are <= 0.05, so the defect of any product pair
  // is at most 3 * 0.05 * sqrt2 at metric scale 1.
  CHECK(sigma.defect() > 0.0);
  CHECK(sigma.defect() <= 3 * 0.05 * std::numbers::sqrt2 + 1e-12);
  CHECK_THAT(sigma.defect(), WithinAbs(std::numbers::sqrt2 * 0.11, 1e-12));
}

TEST_CASE("one sweep repairs commuting rotation noise", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.03, -0.05, 0.02});
  const auto improved = improve(sigma);
  // Rotations commute, so the mean subtracts the average noise in one step.
  CHECK(improved.defect() < 1e-13);
}

TEST_CASE("averaging terminates with certified displacement", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.03, -0.05, 0.02});
  const auto r = average_to_homomorphism(sigma);
  CHECK(r.initial_defect == sigma.defect());
  CHECK(r.final_defect < 1e-12);
  CHECK(r.corrected.is_homomorphism(1e-12));
  CHECK(r.displacement <= r.displacement_bound);
  CHECK(r.displacement_bound == 1.36 * r.initial_defect);
  CHECK(r.sweeps >= 1);
}

TEST_CASE("identity maps are left alone", "[almosthom]") {
  const FiniteGroup triv = FiniteGroup::cyclic(1);
  const MatrixGroupTarget t{GroupKind::SpecialOrthogonal, 2};
  const AlmostHomomorphism sigma(triv, t, {Matrix::Identity(2, 2)});
  const auto r = average_to_homomorphism(sigma);
  CHECK(r.sweeps == 0);
  CHECK(r.displacement == 0.0);
}

TEST_CASE("averaging commutes with conjugation", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.04, -0.03, 0.01});
  const Matrix a = rot2(0.9);
  std::vector<Matrix> conj;
  for (int g = 0; g < 4; ++g)
    conj.push_back(a * sigma.value(g) * a.adjoint());
  const AlmostHomomorphism tau(sigma.group(), sigma.target(),
                               std::move(conj));
  const auto rs = average_to_homomorphism(sigma);
  const auto rt = average_to_homomorphism(tau);
  for (int g = 0; g < 4; ++g)
    CHECK((rt.corrected.value(g) -
           a * rs.corrected.value(g) * a.adjoint()).norm() < 1e-10);
}

TEST_CASE("big defects are refused unless forced", "[almosthom]") {
  const auto sigma = perturbed_c4({0.0, 0.23, 0.0, 0.0});
  REQUIRE(sigma.defect() > std::numbers::pi / 6.0);
  try {
    average_to_homomorphism(sigma);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DefectTooLarge);
  }
  // The forced run may still converge here; rotations commute.
  const auto r = average_to_homomorphism(sigma, 1e-12, 50, true);
  CHECK(r.final_defect < 1e-12);
}

TEST_CASE("representation averaging repairs small defects", "[almosthom]") {
  const FiniteGroup c3 = FiniteGroup::cyclic(3);
  const std::complex<double> omega =
      std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> u(-3e-6, 3e-6);
  std::vector<Matrix> vals;
  for (int k = 0; k < 3; ++k) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = std::pow(omega, k);
    Matrix e(2, 2);
    e << u(gen), u(gen), u(gen), u(gen);
    vals.push_back(d * (Matrix::Identity(2, 2) + e));
  }
  const double eps = std::pow(2.0, -6.0);
  const auto r = average_to_representation(c3, vals, 1.01, eps);
  CHECK(r.final_defect < 1e-12);
  CHECK(r.displacement <= eps);
  CHECK(representation_defect(c3, r.corrected) < 1e-12);
}

TEST_CASE("representation hypotheses are gated", "[almosthom]") {
  const FiniteGroup c2 = FiniteGroup::cyclic(2);
  std::vector<Matrix> vals{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};

  auto code_of = [&](double k, double eps) {
    try {
      average_to_representation(c2, vals, k, eps);
      return ErrorCode::NoConvergence;  // placeholder meaning "no throw"
    } catch (const Error& e) {
      return e.code();
    }
  };
  CHECK(code_of(0.5, 0.01) == ErrorCode::HypothesisViolated);   // K < 1
  CHECK(code_of(1.01, 0.5) == ErrorCode::HypothesisViolated);   // eps > 2^-6
  CHECK(code_of(1.01, -1.0) == ErrorCode::HypothesisViolated);  // eps <= 0
  CHECK(code_of(1.01, 0.01) == ErrorCode::NoConvergence);       // all pass

  // Norm bound violation.
  std::vector<Matrix> big{2.0 * Matrix::Identity(2, 2),
                          2.0 * Matrix::Identity(2, 2)};
  try {
    average_to_representation(c2, big, 1.01, 0.01);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
  }

  // Defect above the eps (2K)^-9 gate.
  std::vector<Matrix> off{Matrix::Identity(2, 2),
                          rot2(1e-3)};
  try {
    average_to_representation(c2, off, 1.01, std::pow(2.0, -6.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
  }
}

TEST_CASE("exact representations are fixed points", "[almosthom]") {
  const FiniteGroup c4 = FiniteGroup::cyclic(4);
  std::vector<Matrix> vals;
  for (int k = 0; k < 4; ++k) vals.push_back(rot2(k * std::numbers::pi / 2));
  const auto r = average_to_representation(c4, vals, 1.01, 0.01);
  CHECK(r.sweeps == 0);
  CHECK(r.displacement == 0.0);
}
