#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "levi/io.hpp"
#include "levi/report.hpp"

using namespace levi;

namespace {

std::string data_path(const std::string& name) {
  return std::string(LEVI_DATA_DIR) + "/" + name;
}

// Runs the command line tool; returns the process exit code.
int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(LEVI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "levi_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("polynomials survive a JSON round trip", "[io]") {
  auto x = [](int i) { return TruncatedPolynomial::variable(2, 4, i); };
  const auto p = x(0) * x(0) + Rational(-7, 3) * x(1);
  CHECK(poly_from_json(poly_to_json(p)) == p);
  CHECK(poly_from_json(poly_to_json(TruncatedPolynomial(3, 2))) ==
        TruncatedPolynomial(3, 2));
}

TEST_CASE("bracket tables survive a JSON round trip", "[io]") {
  PoissonStructure p(3, 5);
  auto x = [](int i) { return TruncatedPolynomial::variable(3, 5, i); };
  p.set_entry(0, 1, x(2) + x(2) * x(2));
  p.set_entry(1, 2, x(0) * Rational(1, 6));
  const Json j = poisson_to_json(p);
  CHECK(poisson_from_json(j) == p);
  // Entries are stored upper-triangular with 1-based keys.
  CHECK(j["brackets"].contains("1,2"));
  CHECK_FALSE(j["brackets"].contains("2,1"));
}

TEST_CASE("lie algebras survive a JSON round trip", "[io]") {
  const LieAlgebra g = LieAlgebra::so3();
  CHECK(lie_algebra_from_json(lie_algebra_to_json(g)) == g);
  const LieAlgebra a = LieAlgebra::abelian(2);
  CHECK(lie_algebra_from_json(lie_algebra_to_json(a)) == a);
}

TEST_CASE("algebroids survive a JSON round trip", "[io]") {
  const Json j = load_json_file(data_path("so3_action_disturbed.json"));
  const LieAlgebroid a = algebroid_from_json(j);
  CHECK(algebroid_from_json(algebroid_to_json(a)) == a);
  CHECK(a.satisfies_axioms());
}

TEST_CASE("groups and coordinate changes round trip", "[io]") {
  const FiniteGroup q8 = FiniteGroup::quaternion();
  CHECK(finite_group_from_json(finite_group_to_json(q8)) == q8);

  auto x = [](int i) { return TruncatedPolynomial::variable(2, 3, i); };
  const CoordinateChange phi({x(0) + x(1) * x(1), x(1)});
  CHECK(coordinate_change_from_json(coordinate_change_to_json(phi)) == phi);
}

TEST_CASE("group maps round trip through JSON exactly", "[io]") {
  const Json jg = load_json_file(data_path("c4.json"));
  const FiniteGroup c4 = finite_group_from_json(jg);
  const Json jh = load_json_file(data_path("c4_so3.json"));
  const AlmostHomomorphism h = hom_from_json(c4, jh);
  const Json back = hom_to_json(h);
  const AlmostHomomorphism h2 = hom_from_json(c4, back);
  for (int g = 0; g < 4; ++g)
    CHECK((h.value(g) - h2.value(g)).norm() == 0.0);

  const Json jr = load_json_file(data_path("c3_rep.json"));
  const FiniteGroup c3 =
      finite_group_from_json(load_json_file(data_path("c3.json")));
  const RepInput rep = rep_from_json(c3, jr);
  CHECK(rep.dim == 2);
  CHECK(rep.norm_bound == 1.01);
  CHECK(rep.eps == 0.015625);
  const Json vals = rep_values_to_json(rep.values);
  const RepInput rep2 = rep_from_json(c3, [&] {
    Json copy = jr;
    copy["values"] = vals;
    return copy;
  }());
  for (std::size_t g = 0; g < rep.values.size(); ++g)
    CHECK((rep.values[g] - rep2.values[g]).norm() == 0.0);
}

TEST_CASE("isometries round trip", "[io]") {
  MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  VectorXd t(2);
  t << 0.25, -3.5;
  const Isometry iso{rot, t};
  const Isometry back = isometry_from_json(isometry_to_json(iso), 2);
  CHECK((back.linear - rot).norm() == 0.0);
  CHECK((back.translation - t).norm() == 0.0);
}

TEST_CASE("JSON syntax errors carry line and column", "[io]") {
  try {
    parse_json_text("{\n  \"a\": [1,\n}\n", "test-input");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("test-input") != std::string::npos);
  }
}

TEST_CASE("coefficients accept fractions and integers only", "[io]") {
  CHECK(detail::coeff_from_json(Json("3/4")) == Rational(3, 4));
  CHECK(detail::coeff_from_json(Json(-12)) == Rational(-12));
  CHECK_THROWS_AS(detail::coeff_from_json(Json(0.5)), Error);
  CHECK_THROWS_AS(detail::coeff_from_json(Json("0.5")), Error);
}

TEST_CASE("malformed structure files are rejected with context", "[io]") {
  CHECK_THROWS_AS(poisson_from_json(Json{{"n", 3}}), Error);
  CHECK_THROWS_AS(
      poisson_from_json(Json{
          {"n", 3}, {"order", 2}, {"brackets", Json{{"3,1", Json::array()}}}}),
      Error);  // keys must have i < j
  CHECK_THROWS_AS(lie_algebra_from_json(Json{{"dim", 0}, {"c", Json::array()}}),
                  Error);
  CHECK_THROWS_AS(detail::parse_index_key("1,2,3", 2), Error);
  CHECK_THROWS_AS(detail::parse_index_key("a,b", 2), Error);
}

TEST_CASE("CSV files round trip doubles exactly", "[io]") {
  std::mt19937_64 gen(91);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd m(7, 3);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = std::ldexp(u(gen), -j * 30);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = 1e-300;
  m(2, 2) = -0.0;
  const auto path = (temp_dir() / "roundtrip.csv").string();
  save_csv(path, m);
  const MatrixXd back = load_csv(path);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("CSV errors carry the offending line", "[io]") {
  const auto dir = temp_dir();
  const auto bad_cell = (dir / "bad_cell.csv").string();
  write_text_file(bad_cell, "1.0,2.0\n3.0,oops\n");
  try {
    load_csv(bad_cell);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  const auto ragged = (dir / "ragged.csv").string();
  write_text_file(ragged, "1.0,2.0\n3.0\n");
  CHECK_THROWS_AS(load_csv(ragged), Error);
}

TEST_CASE("submanifold files load with their sidecars", "[io]") {
  const SubmanifoldInput in = submanifold_from_files(
      data_path("circle_offset.csv"),
      load_json_file(data_path("circle_offset.json")));
  CHECK(in.submanifold.sample_count() == 64);
  CHECK(in.submanifold.topology() == Topology::ClosedCurve);
  CHECK(in.ambient.group_size() == 2);

  const SubmanifoldInput patch = submanifold_from_files(
      data_path("patch_bump.csv"),
      load_json_file(data_path("patch_bump.json")));
  CHECK(patch.submanifold.topology() == Topology::Patch);
  CHECK(patch.submanifold.grid_u() == 17);
  CHECK(patch.submanifold.sample_count() == 17 * 17);
}

TEST_CASE("input kinds are detected from the schema", "[io]") {
  auto kind_of = [](const std::string& name) {
    return detect_kind(load_json_file(data_path(name)));
  };
  CHECK(kind_of("so3_linear.json") == InputKind::Poisson);
  CHECK(kind_of("so3_algebra.json") == InputKind::LieAlgebra);
  CHECK(kind_of("so3_action.json") == InputKind::Algebroid);
  CHECK(kind_of("c4.json") == InputKind::Group);
  CHECK(kind_of("c4_so3.json") == InputKind::Homomorphism);
  CHECK(kind_of("c3_rep.json") == InputKind::Representation);
  CHECK(kind_of("circle_offset.json") == InputKind::Submanifold);
  CHECK_THROWS_AS(detect_kind(Json{{"unrelated", 1}}), Error);
}

TEST_CASE("reported numbers are rounded to twelve significant digits",
          "[io]") {
  CHECK(report_number(1.0 / 3.0) == 0.333333333333);
  CHECK(report_number(123456789012345.0) == 123456789012000.0);
  CHECK(report_number(0.0) == 0.0);
  CHECK(report_number(-2.5e-7) == -2.5e-7);
}

TEST_CASE("digests are stable", "[io]") {
  CHECK(digest_hex("") == "cbf29ce484222325");
  CHECK(digest_hex("abc") == digest_hex("abc"));
  CHECK(digest_hex("abc") != digest_hex("abd"));
}

TEST_CASE("the tool maps outcomes to exit codes", "[io]") {
  CHECK(run_cli("check " + data_path("so3_linear.json")) == 0);
  CHECK(run_cli("check " + data_path("broken_jacobi.json")) == 1);
  CHECK(run_cli("linearize " + data_path("abelian_obstructed.json")) == 2);
  CHECK(run_cli("average submanifold " + data_path("circle_wobble.csv") +
                " " + data_path("circle_wobble.json")) == 3);
  CHECK(run_cli("linearize " + data_path("so3_linear.json") + " --order 9") ==
        64);
  CHECK(run_cli("check") == 64);
  CHECK(run_cli("frobnicate") == 64);
  CHECK(run_cli("check /no/such/file.json") == 1);
}

TEST_CASE("stamped reports are byte-stable without timestamps", "[io]") {
  const auto dir = temp_dir();
  const std::string prefix = (dir / "det").string();
  const std::string args = "linearize " + data_path("so3_perturbed.json") +
                           " --no-timestamp --output " + prefix;
  REQUIRE(run_cli(args) == 0);
  const std::string first = read_text_file(prefix + ".report.json");
  const std::string first_change = read_text_file(prefix + ".change.json");
  REQUIRE(run_cli(args) == 0);
  CHECK(read_text_file(prefix + ".report.json") == first);
  CHECK(read_text_file(prefix + ".change.json") == first_change);
  CHECK(first.find("wall_ms") == std::string::npos);
  CHECK(first.find("timestamp") == std::string::npos);
}
