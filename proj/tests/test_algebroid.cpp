#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "levi/algebroid.hpp"
#include "levi/normalform.hpp"

using namespace levi;

namespace {

// Infinitesimal rotation action of so(3) on R^3: M_i(k, j) = -c_ij^k.
LieAlgebroid rotation_action(int order) {
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

FrameChange random_frame_change(std::mt19937& gen, int rank, int base_dim,
                                int order, int max_degree) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  PolyMat t(static_cast<std::size_t>(rank),
            std::vector<TruncatedPolynomial>(
                static_cast<std::size_t>(rank),
                TruncatedPolynomial(base_dim, order)));
  for (int i = 0; i < rank; ++i) {
    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
        TruncatedPolynomial::constant(base_dim, order, 1);
    for (int j = 0; j < rank; ++j)
      for (int d = 1; d <= max_degree; ++d)
        for (const Exponents& e : monomials_of_degree(base_dim, d)) {
          const int a = coeff(gen);
          if (a != 0)
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                TruncatedPolynomial::monomial(base_dim, order, e,
                                              Rational(a, 5));
        }
  }
  return FrameChange(std::move(t));
}

CoordinateChange random_chart(std::mt19937& gen, int n, int order,
                              int max_degree) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::vector<TruncatedPolynomial> comps;
  for (int i = 0; i < n; ++i) {
    auto c = TruncatedPolynomial::variable(n, order, i);
    for (int d = 2; d <= max_degree; ++d)
      for (const Exponents& e : monomials_of_degree(n, d)) {
        const int a = coeff(gen);
        if (a != 0)
          c += TruncatedPolynomial::monomial(n, order, e, Rational(a, 5));
      }
    comps.push_back(c);
  }
  return CoordinateChange(std::move(comps));
}

}  // namespace

TEST_CASE("the rotation action is an algebroid", "[algebroid]") {
  const LieAlgebroid a = rotation_action(4);
  CHECK(a.satisfies_axioms());
  CHECK(a.fiber_algebra() == LieAlgebra::so3());
  CHECK(a.anchor_compat_residual(0, 1, 0).is_zero());
  CHECK(a.jacobiator(0, 1, 2, 0).is_zero());

  const auto anchors = a.linear_anchor();
  REQUIRE(anchors.size() == 3);
  // rho(e_1) rotates the x2-x3 plane: entry (j, k) is -c_1k^j.
  CHECK(anchors[0].at(2, 1) == -1);
  CHECK(anchors[0].at(1, 2) == 1);
  CHECK(anchors[0].at(0, 0) == 0);
}

TEST_CASE("constructor validates shapes and antisymmetry", "[algebroid]") {
  const int n = 2, d = 2, order = 3;
  std::vector<TruncatedPolynomial> c(
      static_cast<std::size_t>(n) * n * n, TruncatedPolynomial(d, order));
  std::vector<TruncatedPolynomial> b(
      static_cast<std::size_t>(n) * d, TruncatedPolynomial(d, order));
  CHECK_NOTHROW(LieAlgebroid(n, d, order, c, b));

  auto bad_c = c;
  bad_c[0 * n * n + 0 * n + 0] =
      TruncatedPolynomial::variable(d, order, 0);  // c_00 must vanish
  CHECK_THROWS_AS(LieAlgebroid(n, d, order, bad_c, b), Error);

  auto bad_b = b;
  bad_b[0] = TruncatedPolynomial::constant(d, order, 1);
  CHECK_THROWS_AS(LieAlgebroid(n, d, order, c, bad_b), Error);
}

TEST_CASE("frame changes invert exactly", "[algebroid]") {
  std::mt19937 gen(51);
  const FrameChange t = random_frame_change(gen, 3, 3, 4, 2);
  const FrameChange id = FrameChange::identity(3, 3, 4);
  CHECK(compose_frames(t, t.inverse()) == id);
  CHECK(compose_frames(t.inverse(), t) == id);
}

TEST_CASE("singular frame changes are rejected", "[algebroid]") {
  PolyMat t(2, std::vector<TruncatedPolynomial>(2, TruncatedPolynomial(2, 3)));
  t[0][0] = TruncatedPolynomial::constant(2, 3, 1);
  t[0][1] = TruncatedPolynomial::constant(2, 3, 1);
  t[1][0] = TruncatedPolynomial::constant(2, 3, 1);
  t[1][1] = TruncatedPolynomial::constant(2, 3, 1);
  try {
    FrameChange f(std::move(t));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularLinearPart);
  }
}

TEST_CASE("frame and chart changes preserve the axioms", "[algebroid]") {
  std::mt19937 gen(52);
  const LieAlgebroid a = rotation_action(4);
  const LieAlgebroid b = a.change_frame(random_frame_change(gen, 3, 3, 4, 2));
  CHECK(b.satisfies_axioms());
  const LieAlgebroid c = b.change_coordinates(random_chart(gen, 3, 4, 3));
  CHECK(c.satisfies_axioms());
}

TEST_CASE("frame changes compose contravariantly", "[algebroid]") {
  std::mt19937 gen(53);
  const LieAlgebroid a = rotation_action(3);
  const FrameChange t1 = random_frame_change(gen, 3, 3, 3, 1);
  const FrameChange t2 = random_frame_change(gen, 3, 3, 3, 1);
  CHECK(a.change_frame(t1).change_frame(t2) ==
        a.change_frame(compose_frames(t2, t1)));
}

TEST_CASE("chart changes compose like substitution", "[algebroid]") {
  std::mt19937 gen(54);
  const LieAlgebroid a = rotation_action(3);
  const CoordinateChange chi1 = random_chart(gen, 3, 3, 2);
  const CoordinateChange chi2 = random_chart(gen, 3, 3, 2);
  CHECK(a.change_coordinates(chi1).change_coordinates(chi2) ==
        a.change_coordinates(compose(chi2, chi1)));
}

TEST_CASE("frame and chart changes undo exactly", "[algebroid]") {
  std::mt19937 gen(55);
  const LieAlgebroid a = rotation_action(4);
  const FrameChange t = random_frame_change(gen, 3, 3, 4, 2);
  CHECK(a.change_frame(t).change_frame(t.inverse()) == a);
  const CoordinateChange chi = random_chart(gen, 3, 4, 3);
  CHECK(a.change_coordinates(chi).change_coordinates(invert_change(chi)) == a);
}

TEST_CASE("disturbed action algebroids linearize back exactly",
          "[algebroid]") {
  std::mt19937 gen(56);
  const LieAlgebroid a = rotation_action(4);
  for (int trial = 0; trial < 3; ++trial) {
    const LieAlgebroid moved =
        a.change_frame(random_frame_change(gen, 3, 3, 4, 2))
            .change_coordinates(random_chart(gen, 3, 4, 2));
    const auto r = linearize_algebroid(moved, 4);
    REQUIRE(r.success);
    CHECK(r.achieved_order == 4);
    // Phase 1 flattens the bracket table, phase 2 the anchor; the result
    // is the exact action algebroid again.
    CHECK(r.result == a);
    CHECK(moved.change_frame(r.frame_change)
              .change_coordinates(r.coordinate_change) == r.result);
  }
}

TEST_CASE("linearization records show both phases", "[algebroid]") {
  std::mt19937 gen(57);
  const LieAlgebroid a = rotation_action(4);
  const LieAlgebroid moved =
      a.change_frame(random_frame_change(gen, 3, 3, 4, 2))
          .change_coordinates(random_chart(gen, 3, 4, 2));
  const auto r = linearize_algebroid(moved, 4);
  REQUIRE(r.success);
  bool saw_frame = false, saw_chart = false;
  for (const auto& rec : r.records) {
    CHECK(rec.solved);
    if (rec.phase == 1) saw_frame = true;
    if (rec.phase == 2) saw_chart = true;
  }
  CHECK(saw_frame);
  CHECK(saw_chart);
}

TEST_CASE("the flat abelian algebroid is already linear", "[algebroid]") {
  const int n = 2, d = 2, order = 3;
  std::vector<TruncatedPolynomial> c(
      static_cast<std::size_t>(n) * n * n, TruncatedPolynomial(d, order));
  std::vector<TruncatedPolynomial> b(
      static_cast<std::size_t>(n) * d, TruncatedPolynomial(d, order));
  const LieAlgebroid a(n, d, order, c, b);
  const auto r = linearize_algebroid(a, order);
  REQUIRE(r.success);
  CHECK(r.result == a);
  CHECK(r.frame_change == FrameChange::identity(n, d, order));
  CHECK(r.coordinate_change.is_identity());
}
