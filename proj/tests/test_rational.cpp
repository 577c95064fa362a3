#include <catch2/catch_amalgamated.hpp>

#include "levi/exact_linear.hpp"
#include "levi/rational.hpp"

using namespace levi;

TEST_CASE("fraction strings round-trip", "[rational]") {
  CHECK(to_fraction_string(Rational(0)) == "0");
  CHECK(to_fraction_string(Rational(5)) == "5");
  CHECK(to_fraction_string(Rational(-5)) == "-5");
  CHECK(to_fraction_string(Rational(3, 4)) == "3/4");
  CHECK(to_fraction_string(Rational(-3, 4)) == "-3/4");
  CHECK(to_fraction_string(Rational(6, 4)) == "3/2");

  CHECK(parse_fraction("0") == Rational(0));
  CHECK(parse_fraction("-12") == Rational(-12));
  CHECK(parse_fraction("3/4") == Rational(3, 4));
  CHECK(parse_fraction("-6/4") == Rational(-3, 2));
  CHECK(parse_fraction("1/-2") == Rational(-1, 2));
  for (const char* s : {"0", "7", "-7", "22/7", "-22/7", "1/3"})
    CHECK(to_fraction_string(parse_fraction(s)) == s);
}

TEST_CASE("fraction strings support big values", "[rational]") {
  const std::string big = "340282366920938463463374607431768211457";  // 2^128+1
  const Rational r = parse_fraction(big + "/3");
  CHECK(to_fraction_string(r * 3) == big);
}

TEST_CASE("malformed fractions are rejected", "[rational]") {
  for (const char* s : {"", "/", "1/", "/2", "1.5", "1e3", "2/0", "a", "--3",
                        "3 / 4"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse_fraction(s), Error);
  }
  try {
    parse_fraction("2/0");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("rational matrices multiply and invert exactly", "[rational]") {
  RatMat a(3, 3);
  int v = 1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a.at(i, j) = Rational(v++, i + 1);
  a.at(2, 2) = 11;  // keep it nonsingular
  const auto inv = a.inverse();
  REQUIRE(inv.has_value());
  CHECK(a * *inv == RatMat::identity(3));
  CHECK(*inv * a == RatMat::identity(3));
  CHECK(a.det() * inv->det() == 1);
}

TEST_CASE("determinant matches cofactor expansion on 2x2", "[rational]") {
  RatMat m(2, 2);
  m.at(0, 0) = Rational(1, 2);
  m.at(0, 1) = Rational(2, 3);
  m.at(1, 0) = Rational(3, 4);
  m.at(1, 1) = Rational(4, 5);
  CHECK(m.det() == Rational(1, 2) * Rational(4, 5) -
                       Rational(2, 3) * Rational(3, 4));
}

TEST_CASE("rank detects dependent rows", "[rational]") {
  RatMat m(3, 3);
  for (int j = 0; j < 3; ++j) {
    m.at(0, j) = j + 1;
    m.at(1, j) = 2 * (j + 1);       // 2x row 0
    m.at(2, j) = Rational(j * j);   // independent
  }
  CHECK(m.rank() == 2);
  CHECK(m.det() == 0);
  CHECK_FALSE(m.inverse().has_value());
}

TEST_CASE("linear solve returns exact solutions and detects inconsistency",
          "[rational]") {
  RatMat a(3, 2);
  a.at(0, 0) = 1; a.at(0, 1) = 2;
  a.at(1, 0) = 3; a.at(1, 1) = 4;
  a.at(2, 0) = 4; a.at(2, 1) = 6;  // row0 + row1

  RatVec b{Rational(5), Rational(6), Rational(11)};
  const auto sol = solve_linear(a, b);
  REQUIRE(sol.has_value());
  CHECK(a * *sol == b);

  RatVec bad{Rational(5), Rational(6), Rational(12)};
  CHECK_FALSE(solve_linear(a, bad).has_value());
}

TEST_CASE("underdetermined solves zero the free variables", "[rational]") {
  RatMat a(1, 3);
  a.at(0, 0) = 2; a.at(0, 1) = 0; a.at(0, 2) = 5;
  const auto sol = solve_linear(a, RatVec{Rational(7)});
  REQUIRE(sol.has_value());
  CHECK((*sol)[0] == Rational(7, 2));
  CHECK((*sol)[1] == 0);
  CHECK((*sol)[2] == 0);
}
