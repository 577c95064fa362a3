#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "levi/truncpoly.hpp"

using namespace levi;

namespace {

TruncatedPolynomial var(int i, int n = 2, int order = 6) {
  return TruncatedPolynomial::variable(n, order, i);
}

TruncatedPolynomial random_poly(std::mt19937& gen, int n, int order,
                                int max_degree) {
  std::uniform_int_distribution<int> coeff(-4, 4);
  TruncatedPolynomial p(n, order);
  for (int d = 0; d <= max_degree; ++d)
    for (const Exponents& e : monomials_of_degree(n, d)) {
      const int c = coeff(gen);
      if (c != 0) p += TruncatedPolynomial::monomial(n, order, e, c);
    }
  return p;
}

}  // namespace

TEST_CASE("monomial enumeration is graded and complete", "[truncpoly]") {
  const auto deg2 = monomials_of_degree(3, 2);
  CHECK(deg2.size() == 6);  // C(3+2-1, 2)
  GrlexLess less;
  for (std::size_t i = 0; i + 1 < deg2.size(); ++i)
    CHECK(less(deg2[i], deg2[i + 1]));
  for (const Exponents& e : deg2) CHECK(total_degree(e) == 2);

  const auto upto3 = monomials_up_to_degree(2, 3);
  CHECK(upto3.size() == 10);  // 1 + 2 + 3 + 4
  for (std::size_t i = 0; i + 1 < upto3.size(); ++i)
    CHECK(less(upto3[i], upto3[i + 1]));
}

TEST_CASE("products truncate above the ring order", "[truncpoly]") {
  const auto one = TruncatedPolynomial::constant(2, 2, 1);
  const auto x = var(0, 2, 2);
  CHECK((one + x) * (one - x) == one - x * x);

  const auto one1 = TruncatedPolynomial::constant(2, 1, 1);
  const auto x1 = var(0, 2, 1);
  CHECK((one1 + x1) * (one1 - x1) == one1);  // x^2 falls away at order 1
}

TEST_CASE("ring axioms hold on random polynomials", "[truncpoly]") {
  std::mt19937 gen(77);
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = random_poly(gen, 3, 5, 3);
    const auto q = random_poly(gen, 3, 5, 3);
    const auto r = random_poly(gen, 3, 5, 3);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
  }
}

TEST_CASE("derivative satisfies the Leibniz rule", "[truncpoly]") {
  std::mt19937 gen(78);
  for (int rep = 0; rep < 10; ++rep) {
    // Degrees are kept low enough that the product is not truncated.
    const auto p = random_poly(gen, 2, 6, 3);
    const auto q = random_poly(gen, 2, 6, 3);
    for (int v = 0; v < 2; ++v)
      CHECK((p * q).derivative(v) ==
            p.derivative(v) * q + p * q.derivative(v));
  }
}

TEST_CASE("homogeneous parts partition a polynomial", "[truncpoly]") {
  std::mt19937 gen(79);
  const auto p = random_poly(gen, 3, 4, 4);
  TruncatedPolynomial sum(3, 4);
  for (int d = 0; d <= 4; ++d) sum += p.homogeneous_part(d);
  CHECK(sum == p);
  CHECK(p.truncated_to(2) ==
        p.homogeneous_part(0) + p.homogeneous_part(1) + p.homogeneous_part(2));
}

TEST_CASE("degree bookkeeping", "[truncpoly]") {
  const auto x = var(0), y = var(1);
  const auto p = x * x + y * y * y;
  CHECK(p.lowest_degree() == 2);
  CHECK(p.highest_degree() == 3);
  CHECK_FALSE(TruncatedPolynomial(2, 6).lowest_degree().has_value());
  CHECK(p.coefficient({2, 0}) == 1);
  CHECK(p.coefficient({1, 1}) == 0);
}

TEST_CASE("substitution composes polynomials", "[truncpoly]") {
  const auto x = var(0), y = var(1);
  std::vector<TruncatedPolynomial> comps{x + y * y, y};
  const CoordinateChange phi(comps);

  // p(x, y) = x^2 under phi becomes (x + y^2)^2.
  const auto p = x * x;
  CHECK(substitute(p, phi) == x * x + 2 * (x * y * y) + y * y * y * y);
}

TEST_CASE("coordinate change inversion is exact", "[truncpoly]") {
  const auto x = var(0), y = var(1);
  const CoordinateChange phi({x + y * y, y});
  const auto psi = invert_change(phi);
  CHECK(psi.component(0) == x - y * y);
  CHECK(psi.component(1) == y);
  CHECK(compose(phi, psi).is_identity());
  CHECK(compose(psi, phi).is_identity());
}

TEST_CASE("random coordinate changes invert on both sides", "[truncpoly]") {
  std::mt19937 gen(80);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 3, order = 5;
    std::vector<TruncatedPolynomial> comps;
    for (int i = 0; i < n; ++i) {
      auto c = TruncatedPolynomial::variable(n, order, i);
      for (int d = 2; d <= 3; ++d)
        for (const Exponents& e : monomials_of_degree(n, d)) {
          const int a = coeff(gen);
          if (a != 0) c += TruncatedPolynomial::monomial(n, order, e, a);
        }
      comps.push_back(c);
    }
    const CoordinateChange phi(comps);
    const auto psi = invert_change(phi);
    CHECK(compose(phi, psi).is_identity());
    CHECK(compose(psi, phi).is_identity());
  }
}

TEST_CASE("coordinate changes must fix the origin and be regular",
          "[truncpoly]") {
  const auto x = var(0), y = var(1);
  const auto one = TruncatedPolynomial::constant(2, 6, 1);
  CHECK_THROWS_AS(CoordinateChange({x + one, y}), Error);
  try {
    CoordinateChange({x + y, x + y});  // singular degree-1 part
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularLinearPart);
  }
}

TEST_CASE("substitution rejects mismatched rings", "[truncpoly]") {
  const auto q = TruncatedPolynomial::variable(3, 6, 0);
  const CoordinateChange phi = CoordinateChange::identity(2, 6);
  CHECK_THROWS_AS(substitute(q, phi), Error);
}
