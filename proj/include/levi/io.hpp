#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "levi/algebroid.hpp"
#include "levi/almosthom.hpp"
#include "levi/errors.hpp"
#include "levi/liecoh.hpp"
#include "levi/poisson.hpp"
#include "levi/submanifold.hpp"
#include "levi/truncpoly.hpp"

namespace levi {

using Json = nlohmann::ordered_json;

/// File formats. All JSON indices (variables, frame entries, structure
/// constants) are 1-based; keys like "i,j" list only i < j and the loaders
/// perform the antisymmetric completion.

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop =
        std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::ParseError, where + ": line " + std::to_string(line) +
                                    ", column " + std::to_string(col) + ": " +
                                    e.what());
  }
}

inline Json load_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

namespace detail {

inline int require_int(const Json& j, const char* key) {
  require(j.contains(key) && j[key].is_number_integer(), ErrorCode::ParseError,
          std::string("missing or non-integer field \"") + key + "\"");
  return j[key].get<int>();
}

inline std::string require_string(const Json& j, const char* key) {
  require(j.contains(key) && j[key].is_string(), ErrorCode::ParseError,
          std::string("missing or non-string field \"") + key + "\"");
  return j[key].get<std::string>();
}

inline Rational coeff_from_json(const Json& v) {
  if (v.is_string()) return parse_fraction(v.get<std::string>());
  require(v.is_number_integer(), ErrorCode::ParseError,
          "coefficients must be \"p/q\" strings or integers");
  return Rational(v.get<long long>());
}

/// Key "i,j" or "i,j,k" with 1-based entries.
inline std::vector<int> parse_index_key(const std::string& key, int count) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t comma = key.find(',', pos);
    const std::string tok =
        key.substr(pos, comma == std::string::npos ? std::string::npos
                                                   : comma - pos);
    require(!tok.empty(), ErrorCode::ParseError,
            "bad index key \"" + key + "\"");
    for (char ch : tok)
      require(ch >= '0' && ch <= '9', ErrorCode::ParseError,
              "bad index key \"" + key + "\"");
    out.push_back(std::atoi(tok.c_str()));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  require(static_cast<int>(out.size()) == count, ErrorCode::ParseError,
          "index key \"" + key + "\" should have " + std::to_string(count) +
              " entries");
  return out;
}

inline TruncatedPolynomial terms_from_json(const Json& terms, int n,
                                           int order) {
  require(terms.is_array(), ErrorCode::ParseError, "\"terms\" must be a list");
  TruncatedPolynomial p(n, order);
  for (const auto& t : terms) {
    require(t.is_object() && t.contains("exps") && t.contains("coeff"),
            ErrorCode::ParseError, "each term needs \"exps\" and \"coeff\"");
    const auto& je = t["exps"];
    require(je.is_array() && static_cast<int>(je.size()) == n,
            ErrorCode::ParseError, "\"exps\" must list one exponent per variable");
    Exponents e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      require(je[static_cast<std::size_t>(i)].is_number_integer() &&
                  je[static_cast<std::size_t>(i)].get<int>() >= 0,
              ErrorCode::ParseError, "exponents must be nonnegative integers");
      e[static_cast<std::size_t>(i)] = je[static_cast<std::size_t>(i)].get<int>();
    }
    p.add_term(e, coeff_from_json(t["coeff"]));
  }
  return p;
}

inline Json terms_to_json(const TruncatedPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json t;
    t["exps"] = e;
    t["coeff"] = to_fraction_string(c);
    terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace detail

// --- truncated polynomials -------------------------------------------------

inline TruncatedPolynomial poly_from_json(const Json& j) {
  const int n = detail::require_int(j, "n");
  const int order = detail::require_int(j, "order");
  require(n >= 1 && order >= 0, ErrorCode::ParseError,
          "polynomial needs n >= 1 and order >= 0");
  require(j.contains("terms"), ErrorCode::ParseError, "missing \"terms\"");
  return detail::terms_from_json(j["terms"], n, order);
}

inline Json poly_to_json(const TruncatedPolynomial& p) {
  Json j;
  j["n"] = p.num_vars();
  j["order"] = p.order();
  j["terms"] = detail::terms_to_json(p);
  return j;
}

// --- Poisson structures ------------------------------------------------------

inline PoissonStructure poisson_from_json(const Json& j) {
  const int n = detail::require_int(j, "n");
  const int order = detail::require_int(j, "order");
  require(j.contains("brackets") && j["brackets"].is_object(),
          ErrorCode::ParseError, "missing \"brackets\" object");
  PoissonStructure p(n, order);
  for (const auto& [key, terms] : j["brackets"].items()) {
    const auto idx = detail::parse_index_key(key, 2);
    const int i = idx[0] - 1, jj = idx[1] - 1;
    require(i >= 0 && jj < n && i < jj, ErrorCode::ParseError,
            "bracket key \"" + key + "\" must satisfy 1 <= i < j <= n");
    p.set_entry(i, jj, detail::terms_from_json(terms, n, order));
  }
  return p;
}

inline Json poisson_to_json(const PoissonStructure& p) {
  Json brackets = Json::object();
  for (int i = 0; i < p.dim(); ++i)
    for (int j = i + 1; j < p.dim(); ++j) {
      if (p.entry(i, j).is_zero()) continue;
      brackets[std::to_string(i + 1) + "," + std::to_string(j + 1)] =
          detail::terms_to_json(p.entry(i, j));
    }
  Json j;
  j["n"] = p.dim();
  j["order"] = p.order();
  j["brackets"] = std::move(brackets);
  return j;
}

// --- Lie algebras ------------------------------------------------------------

inline LieAlgebra lie_algebra_from_json(const Json& j) {
  const int dim = detail::require_int(j, "dim");
  require(j.contains("c") && j["c"].is_array(), ErrorCode::ParseError,
          "missing \"c\" list");
  std::vector<std::tuple<int, int, int, Rational>> entries;
  for (const auto& e : j["c"]) {
    const int i = detail::require_int(e, "i");
    const int jj = detail::require_int(e, "j");
    const int k = detail::require_int(e, "k");
    require(1 <= i && i < jj && jj <= dim && 1 <= k && k <= dim,
            ErrorCode::ParseError,
            "structure constant indices must satisfy 1 <= i < j <= dim");
    require(e.contains("val"), ErrorCode::ParseError,
            "structure constant entry needs \"val\"");
    entries.emplace_back(i - 1, jj - 1, k - 1,
                         detail::coeff_from_json(e["val"]));
  }
  return LieAlgebra::from_brackets(dim, entries);
}

inline Json lie_algebra_to_json(const LieAlgebra& g) {
  Json list = Json::array();
  for (int i = 0; i < g.dim(); ++i)
    for (int j = i + 1; j < g.dim(); ++j)
      for (int k = 0; k < g.dim(); ++k) {
        if (g.c(i, j, k) == 0) continue;
        Json e;
        e["i"] = i + 1;
        e["j"] = j + 1;
        e["k"] = k + 1;
        e["val"] = to_fraction_string(g.c(i, j, k));
        list.push_back(std::move(e));
      }
  Json j;
  j["dim"] = g.dim();
  j["c"] = std::move(list);
  return j;
}

// --- Lie algebroids ----------------------------------------------------------

inline LieAlgebroid algebroid_from_json(const Json& j) {
  const int rank = detail::require_int(j, "rank");
  const int base_dim = detail::require_int(j, "base_dim");
  const int order = detail::require_int(j, "order");
  require(j.contains("c") && j["c"].is_object() && j.contains("b") &&
              j["b"].is_object(),
          ErrorCode::ParseError, "algebroid needs \"c\" and \"b\" objects");
  const TruncatedPolynomial zero(base_dim, order);
  std::vector<TruncatedPolynomial> c(
      static_cast<std::size_t>(rank) * rank * rank, zero);
  auto c_at = [&](int i, int jj, int k) -> TruncatedPolynomial& {
    return c[(static_cast<std::size_t>(i) * rank + jj) * rank + k];
  };
  for (const auto& [key, terms] : j["c"].items()) {
    const auto idx = detail::parse_index_key(key, 3);
    const int a = idx[0] - 1, b = idx[1] - 1, k = idx[2] - 1;
    require(0 <= a && a < b && b < rank && 0 <= k && k < rank,
            ErrorCode::ParseError,
            "structure key \"" + key + "\" must satisfy 1 <= i < j <= rank");
    auto p = detail::terms_from_json(terms, base_dim, order);
    c_at(a, b, k) = p;
    c_at(b, a, k) = -p;
  }
  std::vector<TruncatedPolynomial> b(
      static_cast<std::size_t>(rank) * base_dim, zero);
  for (const auto& [key, terms] : j["b"].items()) {
    const auto idx = detail::parse_index_key(key, 2);
    const int i = idx[0] - 1, u = idx[1] - 1;
    require(0 <= i && i < rank && 0 <= u && u < base_dim,
            ErrorCode::ParseError, "anchor key \"" + key + "\" out of range");
    b[static_cast<std::size_t>(i) * base_dim + u] =
        detail::terms_from_json(terms, base_dim, order);
  }
  return LieAlgebroid(rank, base_dim, order, std::move(c), std::move(b));
}

inline Json algebroid_to_json(const LieAlgebroid& a) {
  Json jc = Json::object();
  for (int i = 0; i < a.rank(); ++i)
    for (int j = i + 1; j < a.rank(); ++j)
      for (int k = 0; k < a.rank(); ++k) {
        if (a.c(i, j, k).is_zero()) continue;
        jc[std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
           std::to_string(k + 1)] = detail::terms_to_json(a.c(i, j, k));
      }
  Json jb = Json::object();
  for (int i = 0; i < a.rank(); ++i)
    for (int u = 0; u < a.base_dim(); ++u) {
      if (a.anchor(i, u).is_zero()) continue;
      jb[std::to_string(i + 1) + "," + std::to_string(u + 1)] =
          detail::terms_to_json(a.anchor(i, u));
    }
  Json j;
  j["rank"] = a.rank();
  j["base_dim"] = a.base_dim();
  j["order"] = a.order();
  j["c"] = std::move(jc);
  j["b"] = std::move(jb);
  return j;
}

// --- coordinate and frame changes -------------------------------------------

inline Json coordinate_change_to_json(const CoordinateChange& phi) {
  Json comps = Json::array();
  for (int i = 0; i < phi.num_vars(); ++i)
    comps.push_back(detail::terms_to_json(phi.component(i)));
  Json j;
  j["n"] = phi.num_vars();
  j["order"] = phi.order();
  j["components"] = std::move(comps);
  return j;
}

inline CoordinateChange coordinate_change_from_json(const Json& j) {
  const int n = detail::require_int(j, "n");
  const int order = detail::require_int(j, "order");
  require(j.contains("components") && j["components"].is_array() &&
              static_cast<int>(j["components"].size()) == n,
          ErrorCode::ParseError, "coordinate change needs n components");
  std::vector<TruncatedPolynomial> comps;
  for (const auto& c : j["components"])
    comps.push_back(detail::terms_from_json(c, n, order));
  return CoordinateChange(std::move(comps));
}

inline Json frame_change_to_json(const FrameChange& t) {
  Json entries = Json::object();
  for (int i = 0; i < t.rank(); ++i)
    for (int a = 0; a < t.rank(); ++a) {
      if (t.entry(i, a).is_zero()) continue;
      entries[std::to_string(i + 1) + "," + std::to_string(a + 1)] =
          detail::terms_to_json(t.entry(i, a));
    }
  Json j;
  j["rank"] = t.rank();
  j["base_dim"] = t.base_dim();
  j["order"] = t.order();
  j["entries"] = std::move(entries);
  return j;
}

// --- finite groups and almost homomorphisms ---------------------------------

inline FiniteGroup finite_group_from_json(const Json& j) {
  const int size = detail::require_int(j, "size");
  require(j.contains("table") && j["table"].is_array(), ErrorCode::ParseError,
          "missing multiplication \"table\"");
  std::vector<std::vector<int>> table;
  for (const auto& row : j["table"]) {
    require(row.is_array() && static_cast<int>(row.size()) == size,
            ErrorCode::ParseError, "table rows must have length \"size\"");
    std::vector<int> r;
    for (const auto& v : row) {
      require(v.is_number_integer(), ErrorCode::ParseError,
              "table entries must be integers");
      r.push_back(v.get<int>());
    }
    table.push_back(std::move(r));
  }
  require(static_cast<int>(table.size()) == size, ErrorCode::ParseError,
          "table must have \"size\" rows");
  return FiniteGroup(std::move(table));
}

inline Json finite_group_to_json(const FiniteGroup& g) {
  Json j;
  j["size"] = g.size();
  j["table"] = g.table();
  return j;
}

namespace detail {

inline std::complex<double> entry_from_json(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
          ErrorCode::ParseError,
          "matrix entries must be numbers or [re, im] pairs");
  return {v[0].get<double>(), v[1].get<double>()};
}

/// Row-major flat list into a dim x dim complex matrix.
inline Matrix matrix_from_json(const Json& v, int dim) {
  require(v.is_array() && static_cast<int>(v.size()) == dim * dim,
          ErrorCode::ParseError, "matrix must list dim*dim row-major entries");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      m(r, c) = entry_from_json(v[static_cast<std::size_t>(r * dim + c)]);
  return m;
}

inline Json matrix_to_json(const Matrix& m, bool real_entries) {
  Json v = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if (real_entries)
        v.push_back(m(r, c).real());
      else
        v.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
  return v;
}

}  // namespace detail

inline MatrixGroupTarget target_from_json(const Json& j) {
  require(j.is_object() && j.contains("kind") && j.contains("dim"),
          ErrorCode::ParseError, "\"target\" needs \"kind\" and \"dim\"");
  const std::string kind = detail::require_string(j, "kind");
  GroupKind gk;
  if (kind == "SO")
    gk = GroupKind::SpecialOrthogonal;
  else if (kind == "SU")
    gk = GroupKind::SpecialUnitary;
  else
    fail(ErrorCode::ParseError, "target kind must be \"SO\" or \"SU\"");
  MatrixGroupTarget t(gk, detail::require_int(j, "dim"));
  if (j.contains("metric_scale")) {
    require(j["metric_scale"].is_number(), ErrorCode::ParseError,
            "\"metric_scale\" must be a number");
    t.metric_scale = j["metric_scale"].get<double>();
    require(t.metric_scale > 0, ErrorCode::ParseError,
            "\"metric_scale\" must be positive");
  }
  return t;
}

inline AlmostHomomorphism hom_from_json(const FiniteGroup& group,
                                        const Json& j) {
  require(j.contains("target"), ErrorCode::ParseError, "missing \"target\"");
  const MatrixGroupTarget target = target_from_json(j["target"]);
  require(j.contains("values") && j["values"].is_array() &&
              static_cast<int>(j["values"].size()) == group.size(),
          ErrorCode::ParseError, "\"values\" must list one matrix per element");
  std::vector<Matrix> values;
  for (const auto& v : j["values"])
    values.push_back(detail::matrix_from_json(v, target.dim));
  return AlmostHomomorphism(group, target, std::move(values));
}

inline Json hom_to_json(const AlmostHomomorphism& h) {
  Json values = Json::array();
  const bool real = h.target().kind == GroupKind::SpecialOrthogonal;
  for (int g = 0; g < h.group().size(); ++g)
    values.push_back(detail::matrix_to_json(h.value(g), real));
  Json jt;
  jt["kind"] = to_string(h.target().kind);
  jt["dim"] = h.target().dim;
  if (h.target().metric_scale != std::numbers::sqrt2)
    jt["metric_scale"] = h.target().metric_scale;
  Json j;
  j["target"] = std::move(jt);
  j["values"] = std::move(values);
  return j;
}

/// Almost representation input: invertible matrices with the theorem's
/// norm bound and accuracy parameters.
struct RepInput {
  int dim = 0;
  std::vector<Matrix> values;
  double norm_bound = 1.0;
  double eps = 0.0;
};

inline RepInput rep_from_json(const FiniteGroup& group, const Json& j) {
  RepInput r;
  r.dim = detail::require_int(j, "dim");
  require(r.dim >= 1, ErrorCode::ParseError, "\"dim\" must be >= 1");
  require(j.contains("values") && j["values"].is_array() &&
              static_cast<int>(j["values"].size()) == group.size(),
          ErrorCode::ParseError, "\"values\" must list one matrix per element");
  for (const auto& v : j["values"])
    r.values.push_back(detail::matrix_from_json(v, r.dim));
  require(j.contains("norm_bound") && j["norm_bound"].is_number(),
          ErrorCode::ParseError, "missing numeric \"norm_bound\"");
  require(j.contains("eps") && j["eps"].is_number(), ErrorCode::ParseError,
          "missing numeric \"eps\"");
  r.norm_bound = j["norm_bound"].get<double>();
  r.eps = j["eps"].get<double>();
  return r;
}

inline Json rep_values_to_json(const std::vector<Matrix>& values) {
  Json v = Json::array();
  for (const auto& m : values) v.push_back(detail::matrix_to_json(m, false));
  return v;
}

// --- submanifolds ------------------------------------------------------------

/// CSV: one sample per row, ambient coordinates first, then the frame
/// vectors in order. Separator is a comma; blank lines are skipped.
inline MatrixXd load_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string tok = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const char* s = tok.c_str();
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      bool ok = end != s;
      if (ok)
        while (*end) {
          if (*end != ' ' && *end != '\t' && *end != '\r') {
            ok = false;
            break;
          }
          ++end;
        }
      require(ok, ErrorCode::ParseError,
              path + ": line " + std::to_string(line_no) +
                  ": bad numeric field \"" + tok + "\"");
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorCode::ParseError,
              path + ": line " + std::to_string(line_no) +
                  ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::ParseError, path + ": no data rows");
  MatrixXd m(static_cast<int>(rows.size()),
             static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline void save_csv(const std::string& path, const MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::ParseError, "cannot write " + path);
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

struct SubmanifoldInput {
  AmbientSpace ambient;
  DiscretizedSubmanifold submanifold;
};

inline Isometry isometry_from_json(const Json& v, int coord_dim) {
  Json lin;
  VectorXd translation = VectorXd::Zero(coord_dim);
  if (v.is_array()) {
    lin = v;
  } else {
    require(v.is_object() && v.contains("linear"), ErrorCode::ParseError,
            "isometry must be a matrix or {\"linear\", \"translation\"}");
    lin = v["linear"];
    if (v.contains("translation")) {
      const auto& tr = v["translation"];
      require(tr.is_array() && static_cast<int>(tr.size()) == coord_dim,
              ErrorCode::ParseError, "translation length mismatch");
      for (int i = 0; i < coord_dim; ++i)
        translation(i) = tr[static_cast<std::size_t>(i)].get<double>();
    }
  }
  require(lin.is_array() && static_cast<int>(lin.size()) == coord_dim,
          ErrorCode::ParseError, "isometry matrix must have coord-dim rows");
  MatrixXd m(coord_dim, coord_dim);
  for (int r = 0; r < coord_dim; ++r) {
    const auto& row = lin[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<int>(row.size()) == coord_dim,
            ErrorCode::ParseError, "isometry matrix rows must have coord-dim entries");
    for (int c = 0; c < coord_dim; ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return Isometry{std::move(m), std::move(translation)};
}

inline Json isometry_to_json(const Isometry& iso) {
  Json lin = Json::array();
  for (int r = 0; r < iso.linear.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < iso.linear.cols(); ++c) row.push_back(iso.linear(r, c));
    lin.push_back(std::move(row));
  }
  if (iso.translation.size() == 0 || iso.translation.norm() == 0.0) return lin;
  Json j;
  j["linear"] = std::move(lin);
  Json tr = Json::array();
  for (int i = 0; i < iso.translation.size(); ++i)
    tr.push_back(iso.translation(i));
  j["translation"] = std::move(tr);
  return j;
}

inline SubmanifoldInput submanifold_from_files(const std::string& csv_path,
                                               const Json& sidecar) {
  require(sidecar.contains("ambient") && sidecar["ambient"].is_object(),
          ErrorCode::ParseError, "sidecar needs an \"ambient\" object");
  const Json& amb = sidecar["ambient"];
  const std::string kind_str = detail::require_string(amb, "kind");
  AmbientKind kind;
  if (kind_str == "R")
    kind = AmbientKind::Euclidean;
  else if (kind_str == "S")
    kind = AmbientKind::Sphere;
  else
    fail(ErrorCode::ParseError, "ambient kind must be \"R\" or \"S\"");
  const int dim = detail::require_int(amb, "dim");
  require(dim >= 1, ErrorCode::ParseError, "ambient dim must be >= 1");
  const int coord_dim = kind == AmbientKind::Euclidean ? dim : dim + 1;

  const std::string topo = detail::require_string(sidecar, "topology");
  Topology topology;
  if (topo == "closed-curve")
    topology = Topology::ClosedCurve;
  else if (topo == "patch")
    topology = Topology::Patch;
  else
    fail(ErrorCode::ParseError,
         "topology must be \"closed-curve\" or \"patch\"");
  int grid_u = 0, grid_v = 0;
  if (topology == Topology::Patch) {
    require(sidecar.contains("grid") && sidecar["grid"].is_array() &&
                sidecar["grid"].size() == 2,
            ErrorCode::ParseError, "patch sidecar needs \"grid\": [nu, nv]");
    grid_u = sidecar["grid"][0].get<int>();
    grid_v = sidecar["grid"][1].get<int>();
  }

  double metric_scale = 1.0;
  if (sidecar.contains("metric_scale")) {
    require(sidecar["metric_scale"].is_number(), ErrorCode::ParseError,
            "\"metric_scale\" must be a number");
    metric_scale = sidecar["metric_scale"].get<double>();
  }
  require(sidecar.contains("group") && sidecar["group"].is_array() &&
              !sidecar["group"].empty(),
          ErrorCode::ParseError, "sidecar needs a nonempty \"group\" list");
  std::vector<Isometry> group;
  for (const auto& v : sidecar["group"])
    group.push_back(isometry_from_json(v, coord_dim));
  AmbientSpace ambient(kind, dim, std::move(group), metric_scale);

  const MatrixXd data = load_csv(csv_path);
  const int intrinsic = topology == Topology::ClosedCurve ? 1 : 2;
  require(static_cast<int>(data.cols()) == coord_dim * (1 + intrinsic),
          ErrorCode::ParseError,
          csv_path + ": expected " + std::to_string(coord_dim * (1 + intrinsic)) +
              " columns (coordinates plus frame vectors)");
  MatrixXd pts = data.leftCols(coord_dim);
  MatrixXd frames = data.rightCols(coord_dim * intrinsic);
  DiscretizedSubmanifold sub(kind, topology, std::move(pts), std::move(frames),
                             grid_u, grid_v);
  return SubmanifoldInput{std::move(ambient), std::move(sub)};
}

inline MatrixXd submanifold_to_csv_matrix(const DiscretizedSubmanifold& n) {
  MatrixXd out(n.sample_count(), n.coord_dim() * (1 + n.intrinsic_dim()));
  out.leftCols(n.coord_dim()) = n.points();
  out.rightCols(n.coord_dim() * n.intrinsic_dim()) = n.frames();
  return out;
}

// --- input kind detection -----------------------------------------------------

enum class InputKind {
  Polynomial,
  Poisson,
  LieAlgebra,
  Algebroid,
  Group,
  Homomorphism,
  Representation,
  Submanifold,
};

inline InputKind detect_kind(const Json& j) {
  require(j.is_object(), ErrorCode::UnknownKind,
          "top-level JSON value is not an object");
  if (j.contains("brackets")) return InputKind::Poisson;
  if (j.contains("rank") && j.contains("b")) return InputKind::Algebroid;
  if (j.contains("dim") && j.contains("c")) return InputKind::LieAlgebra;
  if (j.contains("terms")) return InputKind::Polynomial;
  if (j.contains("table")) return InputKind::Group;
  if (j.contains("target") && j.contains("values"))
    return InputKind::Homomorphism;
  if (j.contains("values") && j.contains("norm_bound"))
    return InputKind::Representation;
  if (j.contains("ambient") && j.contains("topology"))
    return InputKind::Submanifold;
  fail(ErrorCode::UnknownKind, "cannot determine the input kind");
}

inline const char* to_string(InputKind k) {
  switch (k) {
    case InputKind::Polynomial: return "polynomial";
    case InputKind::Poisson: return "poisson";
    case InputKind::LieAlgebra: return "lie-algebra";
    case InputKind::Algebroid: return "algebroid";
    case InputKind::Group: return "group";
    case InputKind::Homomorphism: return "homomorphism";
    case InputKind::Representation: return "representation";
    case InputKind::Submanifold: return "submanifold";
  }
  return "unknown";
}

}  // namespace levi
