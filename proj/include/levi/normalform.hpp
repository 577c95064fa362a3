#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "levi/algebroid.hpp"
#include "levi/errors.hpp"
#include "levi/liecoh.hpp"
#include "levi/poisson.hpp"
#include "levi/truncpoly.hpp"

namespace levi {

/// One homogeneous step of the normal-form iteration.
struct OrderRecord {
  int order = 0;              // homogeneous degree handled
  int phase = 0;              // 0: bracket table; 1: frame; 2: base chart
  bool solved = false;
  int obstruction_dim = 0;    // dim of the blocking cohomology when stuck
};

namespace detail {

/// Rebuilds a homogeneous polynomial from its grlex coefficient slice.
inline TruncatedPolynomial poly_from_coeffs(
    const std::vector<Exponents>& basis, const RatVec& coeffs, int num_vars,
    int order, std::size_t offset, std::size_t stride) {
  TruncatedPolynomial p(num_vars, order);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const Rational& c = coeffs[offset + r * stride];
    if (c != 0) p.add_term(basis[r], c);
  }
  return p;
}

inline RatVec negate(RatVec v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace detail

struct PoissonLinearizationReport {
  bool success;
  int target_order;
  int achieved_order;   // all degrees 2..achieved_order vanish
  int sign;             // sign accepted by the executable test; 0 if untested
  std::vector<OrderRecord> records;
  CoordinateChange change;
  PoissonStructure result;
};

/// Degree-by-degree normal form of a formal Poisson structure whose linear
/// part is a Lie algebra g. At degree k the defect is a 2-cochain valued in
/// S^k(g); when it is a coboundary d(phi), the chart x -> x + s * phi(x)
/// removes it. The sign s is not assumed: both candidates are tried and
/// exactly one must succeed.
inline PoissonLinearizationReport linearize_poisson(const PoissonStructure& p,
                                                    int target_order) {
  const int n = p.dim();
  const int order = p.order();
  require(target_order >= 1 && target_order <= order, ErrorCode::InvalidInput,
          "target order must lie in 1..order");
  require(p.satisfies_jacobi(), ErrorCode::NotPoisson,
          "bracket table violates the Jacobi identity");

  LieAlgebra g = [&] {
    std::vector<Rational> c(static_cast<std::size_t>(n) * n * n);
    const auto lin = p.linear_part();
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          c[(static_cast<std::size_t>(i) * n + j) * n + k] =
              lin[static_cast<std::size_t>(k)].at(i, j);
    try {
      return LieAlgebra(n, std::move(c));
    } catch (const Error& e) {
      fail(ErrorCode::NotPoisson,
           std::string("degree-1 part is not a Lie algebra (") + e.what() + ")");
    }
  }();
  const Representation adj = adjoint_rep(g);

  PoissonStructure cur = p;
  CoordinateChange total = CoordinateChange::identity(n, order);
  std::vector<OrderRecord> records;
  int sign_used = 0;

  for (int k = 2; k <= target_order; ++k) {
    const Representation rep = adj.symmetric_power(k);
    const auto basis = monomials_of_degree(n, k);
    Cochain psi(2, rep);
    bool any = false;
    for (int t = 0; t < psi.tuple_count(); ++t) {
      const auto& ij = psi.tuples()[static_cast<std::size_t>(t)];
      const TruncatedPolynomial part =
          cur.entry(ij[0], ij[1]).homogeneous_part(k);
      RatVec v(basis.size());
      for (std::size_t r = 0; r < basis.size(); ++r)
        v[r] = part.coefficient(basis[r]);
      for (const auto& x : v)
        if (x != 0) { any = true; break; }
      psi.set_value(t, std::move(v));
    }
    if (!any) {
      records.push_back({k, 0, true, 0});
      continue;
    }
    require(psi.differential().is_zero(), ErrorCode::InternalCocycleFailure,
            "degree defect failed the cocycle identity");
    auto solved = solve_coboundary(psi);
    if (std::holds_alternative<Obstruction>(solved)) {
      const auto& ob = std::get<Obstruction>(solved);
      records.push_back({k, 0, false, ob.obstruction_dim});
      return {false, target_order, k - 1, sign_used, std::move(records),
              total, cur};
    }
    const Cochain& phi = std::get<Cochain>(solved);

    auto candidate = [&](int s) {
      std::vector<TruncatedPolynomial> comps;
      comps.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        TruncatedPolynomial h = detail::poly_from_coeffs(
            basis, phi.value_at(phi.rank_of({i})), n, order, 0, 1);
        comps.push_back(TruncatedPolynomial::variable(n, order, i) +
                        h * Rational(s));
      }
      return CoordinateChange(std::move(comps));
    };
    auto clean_through = [&](const PoissonStructure& q, int deg) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int d = 2; d <= deg; ++d)
            if (!q.entry(i, j).homogeneous_part(d).is_zero()) return false;
      return true;
    };

    int accepted = 0;
    CoordinateChange chart = CoordinateChange::identity(n, order);
    PoissonStructure next = cur;
    for (int s : {-1, +1}) {
      CoordinateChange c = candidate(s);
      PoissonStructure q = cur.pushforward(c);
      if (clean_through(q, k)) {
        require(accepted == 0, ErrorCode::InternalCocycleFailure,
                "both signs removed the defect");
        accepted = s;
        chart = std::move(c);
        next = std::move(q);
      }
    }
    require(accepted != 0, ErrorCode::InternalCocycleFailure,
            "neither sign removed the degree defect");
    require(sign_used == 0 || sign_used == accepted,
            ErrorCode::InternalCocycleFailure,
            "sign choice was not constant across degrees");
    sign_used = accepted;
    cur = std::move(next);
    total = compose(chart, total);
    records.push_back({k, 0, true, 0});
  }

  // Self-check: transporting the input along the accumulated chart must
  // reproduce the final structure exactly.
  require(p.pushforward(total) == cur, ErrorCode::InternalCocycleFailure,
          "accumulated chart does not reproduce the final structure");
  return {true, target_order, target_order, sign_used, std::move(records),
          total, cur};
}

struct AlgebroidLinearizationReport {
  bool success;
  int target_order;
  int achieved_order;
  int sign;
  std::vector<OrderRecord> records;
  FrameChange frame_change;
  CoordinateChange coordinate_change;
  LieAlgebroid result;
};

/// Two-phase normal form of a formal Lie algebroid. Phase 1 flattens the
/// structure functions to their constants by frame changes (defects are
/// 2-cochains valued in S^k(base) tensor g). Phase 2 linearizes the anchor
/// by base chart changes (defects are 1-cochains valued in
/// S^k(base) tensor base). The surviving linear anchor is the linearized
/// action of the fiber algebra.
inline AlgebroidLinearizationReport linearize_algebroid(const LieAlgebroid& a,
                                                        int target_order) {
  const int n = a.rank();
  const int d = a.base_dim();
  const int order = a.order();
  require(target_order >= 1 && target_order <= order, ErrorCode::InvalidInput,
          "target order must lie in 1..order");
  require(a.satisfies_axioms(), ErrorCode::NotAnAlgebroid,
          "input violates the algebroid compatibility identities");

  const LieAlgebra g = a.fiber_algebra();
  const std::vector<RatMat> b = a.linear_anchor();
  const Representation adj = adjoint_rep(g);
  auto wrap = [&](std::vector<RatMat> mats, const char* what) {
    try {
      return Representation(g, std::move(mats));
    } catch (const Error& e) {
      fail(ErrorCode::NotAnAlgebroid,
           std::string(what) + " does not represent the fiber algebra (" +
               e.what() + ")");
    }
  };
  // Polynomial slot: derivations of the base ring along the linear anchor.
  std::vector<RatMat> poly_mats, eps_mats;
  for (const auto& m : b) {
    poly_mats.push_back(m.transpose());
    eps_mats.push_back(RatMat(d, d) - m);
  }
  const Representation base_rep = wrap(std::move(poly_mats), "linear anchor");
  const Representation eps_rep =
      wrap(std::move(eps_mats), "negated linear anchor");

  LieAlgebroid cur = a;
  FrameChange total_frame = FrameChange::identity(n, d, order);
  CoordinateChange total_chart = CoordinateChange::identity(d, order);
  std::vector<OrderRecord> records;
  int sign_used = 0;

  auto fail_report = [&](int phase, int k, int obdim) {
    records.push_back({k, phase, false, obdim});
    return AlgebroidLinearizationReport{
        false, target_order, k - 1, sign_used, std::move(records),
        total_frame, total_chart, cur};
  };

  // Phase 1: make c_ij^k constant through the target degree.
  for (int k = 1; k <= target_order; ++k) {
    const Representation rep = base_rep.symmetric_power(k).tensor_with(adj);
    const auto basis = monomials_of_degree(d, k);
    Cochain psi(2, rep);
    bool any = false;
    for (int t = 0; t < psi.tuple_count(); ++t) {
      const auto& ij = psi.tuples()[static_cast<std::size_t>(t)];
      RatVec v(basis.size() * static_cast<std::size_t>(n));
      for (int l = 0; l < n; ++l) {
        const TruncatedPolynomial part =
            cur.c(ij[0], ij[1], l).homogeneous_part(k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
          v[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)] =
              part.coefficient(basis[r]);
          if (v[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)] != 0)
            any = true;
        }
      }
      psi.set_value(t, std::move(v));
    }
    if (!any) {
      records.push_back({k, 1, true, 0});
      continue;
    }
    require(psi.differential().is_zero(), ErrorCode::InternalCocycleFailure,
            "frame defect failed the cocycle identity");
    auto solved = solve_coboundary(psi);
    if (std::holds_alternative<Obstruction>(solved))
      return fail_report(1, k, std::get<Obstruction>(solved).obstruction_dim);
    const Cochain& phi = std::get<Cochain>(solved);

    auto candidate = [&](int s) {
      PolyMat t = poly_mat_identity(n, d, order);
      for (int i = 0; i < n; ++i) {
        const RatVec& val = phi.value_at(phi.rank_of({i}));
        for (int l = 0; l < n; ++l)
          t[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] +=
              detail::poly_from_coeffs(basis, val, d, order,
                                       static_cast<std::size_t>(l),
                                       static_cast<std::size_t>(n)) *
              Rational(s);
      }
      return FrameChange(std::move(t));
    };
    auto flat_through = [&](const LieAlgebroid& q, int deg) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int l = 0; l < n; ++l)
            for (int dd = 1; dd <= deg; ++dd)
              if (!q.c(i, j, l).homogeneous_part(dd).is_zero()) return false;
      return true;
    };

    int accepted = 0;
    FrameChange step = FrameChange::identity(n, d, order);
    LieAlgebroid next = cur;
    for (int s : {-1, +1}) {
      FrameChange t = candidate(s);
      LieAlgebroid q = cur.change_frame(t);
      if (flat_through(q, k)) {
        require(accepted == 0, ErrorCode::InternalCocycleFailure,
                "both signs removed the frame defect");
        accepted = s;
        step = std::move(t);
        next = std::move(q);
      }
    }
    require(accepted != 0, ErrorCode::InternalCocycleFailure,
            "neither sign removed the frame defect");
    require(sign_used == 0 || sign_used == accepted,
            ErrorCode::InternalCocycleFailure,
            "sign choice was not constant across degrees");
    sign_used = accepted;
    cur = std::move(next);
    total_frame = compose_frames(step, total_frame);
    records.push_back({k, 1, true, 0});
  }

  // Phase 2: linearize the anchor through the target degree; the degree-1
  // part stays put as the induced linear action.
  for (int k = 2; k <= target_order; ++k) {
    const Representation rep = base_rep.symmetric_power(k).tensor_with(eps_rep);
    const auto basis = monomials_of_degree(d, k);
    Cochain psi(1, rep);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      RatVec v(basis.size() * static_cast<std::size_t>(d));
      for (int u = 0; u < d; ++u) {
        const TruncatedPolynomial part = cur.anchor(i, u).homogeneous_part(k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
          v[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(u)] =
              part.coefficient(basis[r]);
          if (v[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(u)] != 0)
            any = true;
        }
      }
      psi.set_value(psi.rank_of({i}), std::move(v));
    }
    if (!any) {
      records.push_back({k, 2, true, 0});
      continue;
    }
    require(psi.differential().is_zero(), ErrorCode::InternalCocycleFailure,
            "chart defect failed the cocycle identity");
    const RatMat d0 = differential_matrix(rep, 0);
    const auto x = solve_linear(d0, psi.flatten());
    if (!x.has_value())
      return fail_report(2, k, cohomology_dim(rep, 1));
    const Cochain phi = Cochain::from_flat(0, rep, *x);

    auto candidate = [&](int s) {
      std::vector<TruncatedPolynomial> comps;
      comps.reserve(static_cast<std::size_t>(d));
      const RatVec& val = phi.value_at(0);
      for (int u = 0; u < d; ++u)
        comps.push_back(TruncatedPolynomial::variable(d, order, u) +
                        detail::poly_from_coeffs(basis, val, d, order,
                                                 static_cast<std::size_t>(u),
                                                 static_cast<std::size_t>(d)) *
                            Rational(s));
      return CoordinateChange(std::move(comps));
    };
    auto linear_through = [&](const LieAlgebroid& q, int deg) {
      for (int i = 0; i < n; ++i)
        for (int u = 0; u < d; ++u)
          for (int dd = 2; dd <= deg; ++dd)
            if (!q.anchor(i, u).homogeneous_part(dd).is_zero()) return false;
      return true;
    };

    int accepted = 0;
    CoordinateChange step = CoordinateChange::identity(d, order);
    LieAlgebroid next = cur;
    for (int s : {-1, +1}) {
      CoordinateChange c = candidate(s);
      LieAlgebroid q = cur.change_coordinates(c);
      if (linear_through(q, k)) {
        require(accepted == 0, ErrorCode::InternalCocycleFailure,
                "both signs removed the chart defect");
        accepted = s;
        step = std::move(c);
        next = std::move(q);
      }
    }
    require(accepted != 0, ErrorCode::InternalCocycleFailure,
            "neither sign removed the chart defect");
    require(sign_used == 0 || sign_used == accepted,
            ErrorCode::InternalCocycleFailure,
            "sign choice was not constant across degrees");
    sign_used = accepted;
    cur = std::move(next);
    total_chart = compose(step, total_chart);
    records.push_back({k, 2, true, 0});
  }

  // Self-check: replaying both accumulated changes on the input must give
  // the final description exactly.
  require(a.change_frame(total_frame).change_coordinates(total_chart) == cur,
          ErrorCode::InternalCocycleFailure,
          "accumulated changes do not reproduce the final description");
  return {true, target_order, target_order, sign_used, std::move(records),
          total_frame, total_chart, cur};
}

}  // namespace levi
