#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>

#include "levi/errors.hpp"

namespace levi {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Renders a rational as "p" or "p/q" with q > 1 and gcd(p, q) = 1.
inline std::string to_fraction_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace detail {
inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}
}  // namespace detail

/// Parses "p" or "p/q" into a canonical rational. Rejects everything else,
/// including decimal or exponent notation.
inline Rational parse_fraction(std::string_view s) {
  const std::size_t slash = s.find('/');
  if (slash == std::string_view::npos) {
    require(detail::is_integer_literal(s), ErrorCode::ParseError,
            "expected integer or fraction, got '" + std::string(s) + "'");
    return Rational(BigInt(std::string(s)));
  }
  const std::string_view p = s.substr(0, slash);
  const std::string_view q = s.substr(slash + 1);
  require(detail::is_integer_literal(p) && detail::is_integer_literal(q),
          ErrorCode::ParseError,
          "expected fraction p/q, got '" + std::string(s) + "'");
  BigInt num{std::string(p)};
  BigInt den{std::string(q)};
  require(den != 0, ErrorCode::ParseError,
          "zero denominator in '" + std::string(s) + "'");
  if (den < 0) {  // cpp_rational insists on a positive denominator
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

}  // namespace levi
