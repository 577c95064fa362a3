#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "levi/errors.hpp"

namespace levi {

/// Exponent vector of a monomial; entry k is the power of variable k.
using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order with x_1 > x_2 > ... : lower total degree
/// first, ties broken so that higher powers of earlier variables come first
/// (degree 2 in two variables reads x1^2, x1 x2, x2^2).
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

/// All monomials in `num_vars` variables of exact total degree `degree`,
/// sorted by GrlexLess.
inline std::vector<Exponents> monomials_of_degree(int num_vars, int degree) {
  require(num_vars >= 1, ErrorCode::InvalidInput, "need at least one variable");
  require(degree >= 0, ErrorCode::InvalidInput, "negative degree");
  std::vector<Exponents> out;
  Exponents cur(static_cast<std::size_t>(num_vars), 0);
  // Recursive enumeration emitting in grlex order: place the largest
  // remaining power on the earliest variable first.
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == num_vars - 1) {
      cur[static_cast<std::size_t>(var)] = remaining;
      out.push_back(cur);
      cur[static_cast<std::size_t>(var)] = 0;
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      cur[static_cast<std::size_t>(var)] = p;
      self(self, var + 1, remaining - p);
    }
    cur[static_cast<std::size_t>(var)] = 0;
  };
  rec(rec, 0, degree);
  return out;
}

/// All monomials of total degree <= max_degree, sorted by GrlexLess
/// (the constant monomial comes first).
inline std::vector<Exponents> monomials_up_to_degree(int num_vars,
                                                     int max_degree) {
  std::vector<Exponents> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto layer = monomials_of_degree(num_vars, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

/// dim of the space of degree-k monomials in m variables: C(m+k-1, k).
inline long long monomial_count(int num_vars, int degree) {
  long long r = 1;
  for (int i = 1; i <= degree; ++i)
    r = r * (num_vars - 1 + i) / i;
  return r;
}

}  // namespace levi
