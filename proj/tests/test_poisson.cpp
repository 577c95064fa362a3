#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "levi/poisson.hpp"

using namespace levi;

namespace {

TruncatedPolynomial x(int i, int order = 6) {
  return TruncatedPolynomial::variable(3, order, i);
}

// {x1,x2} = x3, {x2,x3} = x1, {x1,x3} = -x2.
PoissonStructure cross_product_poisson(int order = 6) {
  PoissonStructure p(3, order);
  p.set_entry(0, 1, x(2, order));
  p.set_entry(1, 2, x(0, order));
  p.set_entry(0, 2, -x(1, order));
  return p;
}

}  // namespace

TEST_CASE("entries stay antisymmetric", "[poisson]") {
  const auto p = cross_product_poisson();
  CHECK(p.entry(1, 0) == -p.entry(0, 1));
  CHECK(p.entry(0, 0).is_zero());
  CHECK(p.bracket(x(0), x(0)).is_zero());
  CHECK(p.bracket(x(0), x(1)) == -p.bracket(x(1), x(0)));
}

TEST_CASE("bracket is a biderivation", "[poisson]") {
  const auto p = cross_product_poisson();
  const auto f = x(0) * x(0), g = x(1), h = x(2) + x(0) * x(1);
  CHECK(p.bracket(f * g, h) == p.bracket(f, h) * g + f * p.bracket(g, h));
  CHECK(p.bracket(x(0) * x(0), x(1)) == 2 * (x(0) * x(2)));
}

TEST_CASE("the cross-product structure satisfies Jacobi exactly", "[poisson]") {
  const auto p = cross_product_poisson();
  CHECK(p.satisfies_jacobi());
  CHECK(p.jacobiator(0, 1, 2).is_zero());
}

TEST_CASE("a broken structure exposes a jacobiator witness", "[poisson]") {
  PoissonStructure p(3, 4);
  p.set_entry(0, 1, x(2, 4));
  p.set_entry(1, 2, x(0, 4));
  p.set_entry(0, 2, x(0, 4) * x(0, 4));
  CHECK_FALSE(p.satisfies_jacobi());
  CHECK(p.jacobiator(0, 1, 2) == -2 * (x(0, 4) * x(2, 4)));
}

TEST_CASE("jacobi holds modulo degrees beyond the stored order", "[poisson]") {
  // The quadratic tail makes the raw jacobiator nonzero only in degrees
  // that the truncated bracket cannot represent faithfully.
  std::mt19937 gen(31);
  std::uniform_int_distribution<int> coeff(-2, 2);
  const int order = 3;
  auto p = cross_product_poisson(order);
  const auto phi_comps = [&] {
    std::vector<TruncatedPolynomial> comps;
    for (int i = 0; i < 3; ++i) {
      auto c = TruncatedPolynomial::variable(3, order, i);
      for (const Exponents& e : monomials_of_degree(3, 2)) {
        const int a = coeff(gen);
        if (a != 0) c += TruncatedPolynomial::monomial(3, order, e, a);
      }
      comps.push_back(c);
    }
    return comps;
  }();
  const auto q = p.pushforward(CoordinateChange(phi_comps));
  CHECK(q.satisfies_jacobi());
  CHECK(q.jacobiator(0, 1, 2).truncated_to(order - 1).is_zero());
}

TEST_CASE("pushforward along the inverse change restores the structure",
          "[poisson]") {
  const auto p = cross_product_poisson(5);
  const auto y2 = TruncatedPolynomial::variable(3, 5, 2);
  const CoordinateChange phi({x(0, 5), x(1, 5), x(2, 5) + y2 * y2});
  const auto q = p.pushforward(phi);
  CHECK(q.pushforward(invert_change(phi)) == p);
}

TEST_CASE("pushforward of the linear structure has a known series",
          "[poisson]") {
  // With phi = (x1, x2, x3 + x3^2), the (1,2) entry becomes the inverse
  // series of t + t^2, whose coefficients alternate as Catalan numbers.
  const int order = 6;
  const auto p = cross_product_poisson(order);
  const auto y2 = TruncatedPolynomial::variable(3, order, 2);
  const CoordinateChange phi(
      {x(0, order), x(1, order), x(2, order) + y2 * y2});
  const auto q = p.pushforward(phi);

  std::vector<Rational> catalan{1, 1, 2, 5, 14, 42};
  TruncatedPolynomial expected(3, order);
  TruncatedPolynomial pw = y2;
  for (int d = 1; d <= order; ++d) {
    const Rational sign = (d % 2 == 1) ? 1 : -1;
    expected += sign * catalan[static_cast<std::size_t>(d - 1)] * pw;
    pw = pw * y2;
  }
  CHECK(q.entry(0, 1) == expected);
}

TEST_CASE("linear part recovers structure constants", "[poisson]") {
  const auto p = cross_product_poisson();
  const auto c = p.linear_part();
  REQUIRE(c.size() == 3);
  // c[k](i,j) is the coefficient of x_{k+1} in {x_{i+1}, x_{j+1}}.
  CHECK(c[2].at(0, 1) == 1);
  CHECK(c[2].at(1, 0) == -1);
  CHECK(c[0].at(1, 2) == 1);
  CHECK(c[1].at(0, 2) == -1);
  CHECK(c[0].at(0, 1) == 0);
}

TEST_CASE("entry validation", "[poisson]") {
  PoissonStructure p(3, 4);
  CHECK_THROWS_AS(p.set_entry(1, 0, x(2, 4)), Error);        // wants i < j
  CHECK_THROWS_AS(p.set_entry(0, 1, x(2, 5)), Error);        // order mismatch
  const auto one = TruncatedPolynomial::constant(3, 4, 1);
  CHECK_THROWS_AS(p.set_entry(0, 1, one), Error);            // constant term
  CHECK_THROWS_AS(p.entry(0, 3), Error);
}
