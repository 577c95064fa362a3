#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levi/io.hpp"
#include "levi/normalform.hpp"
#include "levi/parallel.hpp"
#include "levi/report.hpp"

namespace {

using namespace levi;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitObstructed = 2;
constexpr int kExitRefused = 3;
constexpr int kExitUsage = 64;

bool verbose_logging() {
  const char* v = std::getenv("LEVI_LOG");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void log_step(const std::string& msg) {
  if (verbose_logging()) std::cerr << "levi: " << msg << "\n";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DefectTooLarge:
    case ErrorCode::HypothesisViolated:
      return kExitRefused;
    case ErrorCode::UsageError:
      return kExitUsage;
    default:
      return kExitError;
  }
}

struct Emitter {
  std::string prefix;      // artifact path prefix from --output
  bool with_time = true;   // false under --no-timestamp
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  /// Prints the report to stdout, writes PREFIX.report.json when asked,
  /// and converts the status into the process exit code.
  int finish(RunReport& report, int code) const {
    report.include_time = with_time;
    if (with_time) {
      report.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      report.stamp_now();
    }
    const std::string text = report.serialize();
    std::cout << text;
    if (!prefix.empty()) {
      write_text_file(prefix + ".report.json", text);
      log_step("wrote " + prefix + ".report.json");
    }
    return code;
  }

  bool wants_artifacts() const { return !prefix.empty(); }

  std::string artifact(RunReport& report, const std::string& suffix) const {
    const std::string path = prefix + suffix;
    report.outputs.push_back(path);
    return path;
  }
};

int fail_with(RunReport& report, const Emitter& em, const Error& e) {
  const int code = exit_code_for(e.code());
  report.status = code == kExitRefused ? "refused" : "fail";
  report.error = to_string(e.code());
  report.message = e.what();
  return em.finish(report, code);
}

/// Largest absolute coefficient across a polynomial, as an exact rational.
Rational max_abs_coeff(const TruncatedPolynomial& p) {
  Rational m = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational a = c < 0 ? Rational(-c) : c;
    if (a > m) m = a;
  }
  return m;
}

// --- check -------------------------------------------------------------------

void check_poisson(const Json& j, RunReport& report) {
  const PoissonStructure p = poisson_from_json(j);
  report.records["kind"] = "poisson";
  report.records["n"] = p.dim();
  report.records["order"] = p.order();
  Rational worst = 0;
  std::optional<std::array<int, 3>> witness;
  for (int i = 0; i < p.dim(); ++i)
    for (int jj = i + 1; jj < p.dim(); ++jj)
      for (int k = jj + 1; k < p.dim(); ++k) {
        // Jacobi can only be meaningful below the truncation order.
        const auto jac = p.jacobiator(i, jj, k).truncated_to(p.order() - 1);
        const Rational m = max_abs_coeff(jac);
        if (m > worst) {
          worst = m;
          witness = {i + 1, jj + 1, k + 1};
        }
      }
  report.records["max_jacobi_residual"] = to_fraction_string(worst);
  if (worst != 0) {
    report.records["witness"] = {
        {"i", (*witness)[0]}, {"j", (*witness)[1]}, {"k", (*witness)[2]}};
    report.status = "fail";
    report.error = to_string(ErrorCode::NotPoisson);
    report.message = "Jacobi identity fails";
  }
}

void check_algebroid(const Json& j, RunReport& report) {
  const LieAlgebroid a = algebroid_from_json(j);
  report.records["kind"] = "algebroid";
  report.records["rank"] = a.rank();
  report.records["base_dim"] = a.base_dim();
  report.records["order"] = a.order();
  Rational worst = 0;
  Json witness;
  for (int i = 0; i < a.rank(); ++i)
    for (int jj = i + 1; jj < a.rank(); ++jj) {
      for (int l = 0; l < a.base_dim(); ++l) {
        const Rational m = max_abs_coeff(a.anchor_compat_residual(i, jj, l));
        if (m > worst) {
          worst = m;
          witness = {{"axiom", "anchor"}, {"i", i + 1}, {"j", jj + 1},
                     {"l", l + 1}};
        }
      }
      for (int k = jj + 1; k < a.rank(); ++k)
        for (int l = 0; l < a.rank(); ++l) {
          const Rational m = max_abs_coeff(a.jacobiator(i, jj, k, l));
          if (m > worst) {
            worst = m;
            witness = {{"axiom", "jacobi"}, {"i", i + 1}, {"j", jj + 1},
                       {"k", k + 1}, {"l", l + 1}};
          }
        }
    }
  report.records["max_axiom_residual"] = to_fraction_string(worst);
  if (worst != 0) {
    report.records["witness"] = witness;
    report.status = "fail";
    report.error = to_string(ErrorCode::NotAnAlgebroid);
    report.message = "algebroid axioms fail";
  }
}

void check_lie_algebra(const Json& j, RunReport& report) {
  const LieAlgebra g = lie_algebra_from_json(j);
  report.records["kind"] = "lie-algebra";
  report.records["dim"] = g.dim();
  report.records["killing_det"] = to_fraction_string(g.killing_form().det());
  report.records["semisimple"] = g.is_semisimple();
}

void check_group(const Json& j, RunReport& report) {
  const FiniteGroup g = finite_group_from_json(j);
  report.records["kind"] = "group";
  report.records["size"] = g.size();
}

void check_hom(const Json& j, const std::optional<FiniteGroup>& group,
               RunReport& report) {
  report.records["kind"] = "homomorphism";
  if (group) {
    const AlmostHomomorphism h = hom_from_json(*group, j);
    report.records["group_size"] = group->size();
    report.records["target"] = std::string(to_string(h.target().kind)) + "(" +
                               std::to_string(h.target().dim) + ")";
    report.records["defect"] = report_number(h.defect());
  } else {
    // Without the group file only the individual matrices are checkable.
    require(j.contains("target") && j.contains("values"),
            ErrorCode::ParseError, "missing \"target\" or \"values\"");
    const MatrixGroupTarget target = target_from_json(j["target"]);
    int count = 0;
    for (const auto& v : j["values"]) {
      target.validate_element(detail::matrix_from_json(v, target.dim));
      ++count;
    }
    report.records["target"] = std::string(to_string(target.kind)) + "(" +
                               std::to_string(target.dim) + ")";
    report.records["values_checked"] = count;
  }
}

void check_rep(const Json& j, const std::optional<FiniteGroup>& group,
               RunReport& report) {
  report.records["kind"] = "representation";
  require(group.has_value(), ErrorCode::UsageError,
          "checking a representation file needs the group file as well");
  const RepInput r = rep_from_json(*group, j);
  double worst_norm = 0.0;
  for (const auto& m : r.values) {
    worst_norm = std::max(worst_norm, op_norm(m));
    worst_norm = std::max(worst_norm, op_norm(Matrix(m.inverse())));
  }
  report.records["dim"] = r.dim;
  report.records["group_size"] = group->size();
  report.records["max_norm"] = report_number(worst_norm);
  report.records["norm_bound"] = report_number(r.norm_bound);
  report.records["defect"] = report_number(
      representation_defect(*group, r.values));
  report.records["defect_gate"] =
      report_number(r.eps * std::pow(2.0 * r.norm_bound, -9.0));
}

void check_submanifold(const std::string& csv_path, const Json& sidecar,
                       RunReport& report) {
  const SubmanifoldInput in = submanifold_from_files(csv_path, sidecar);
  report.records["kind"] = "submanifold";
  report.records["samples"] = in.submanifold.sample_count();
  report.records["topology"] =
      in.submanifold.topology() == Topology::ClosedCurve ? "closed-curve"
                                                         : "patch";
  report.records["group_size"] = in.ambient.group_size();
  double eps = 0.0;
  for (int g = 0; g < in.ambient.group_size(); ++g)
    eps = std::max(eps, c1_distance(in.submanifold,
                                    translate(in.submanifold, in.ambient, g),
                                    in.ambient.metric_scale()));
  report.records["epsilon"] = report_number(eps);
}

int run_check(const std::vector<std::string>& paths, const Emitter& em) {
  RunReport report;
  report.command = "check";
  try {
    require(!paths.empty() && paths.size() <= 2, ErrorCode::UsageError,
            "check expects one input file, or two for paired inputs");
    // Paired forms: CSV + sidecar (submanifold) or group + map.
    std::string csv;
    std::vector<Json> docs;
    std::vector<std::string> doc_paths;
    for (const auto& p : paths) {
      const std::string text = read_text_file(p);
      report.add_input(p, text);
      if (p.size() > 4 && p.substr(p.size() - 4) == ".csv") {
        require(csv.empty(), ErrorCode::UsageError,
                "at most one CSV input is supported");
        csv = p;
      } else {
        docs.push_back(parse_json_text(text, p));
        doc_paths.push_back(p);
      }
    }
    if (!csv.empty()) {
      require(docs.size() == 1 &&
                  detect_kind(docs.front()) == InputKind::Submanifold,
              ErrorCode::UsageError,
              "a CSV input needs exactly one submanifold sidecar");
      log_step("checking submanifold " + csv);
      check_submanifold(csv, docs.front(), report);
      return em.finish(report, report.status == "ok" ? kExitOk : kExitError);
    }
    std::optional<FiniteGroup> group;
    std::optional<Json> object;
    for (const auto& d : docs) {
      if (detect_kind(d) == InputKind::Group && !group && docs.size() == 2)
        group = finite_group_from_json(d);
      else
        object = d;
    }
    require(object.has_value(), ErrorCode::UsageError,
            "two group files given; nothing to check them against");
    const InputKind kind = detect_kind(*object);
    log_step(std::string("checking ") + to_string(kind));
    switch (kind) {
      case InputKind::Poisson: check_poisson(*object, report); break;
      case InputKind::Algebroid: check_algebroid(*object, report); break;
      case InputKind::LieAlgebra: check_lie_algebra(*object, report); break;
      case InputKind::Group: check_group(*object, report); break;
      case InputKind::Homomorphism: check_hom(*object, group, report); break;
      case InputKind::Representation: check_rep(*object, group, report); break;
      case InputKind::Polynomial: {
        const TruncatedPolynomial p = poly_from_json(*object);
        report.records["kind"] = "polynomial";
        report.records["n"] = p.num_vars();
        report.records["order"] = p.order();
        report.records["terms"] = static_cast<int>(p.terms().size());
        break;
      }
      case InputKind::Submanifold:
        fail(ErrorCode::UsageError,
             "a submanifold sidecar needs its CSV file as the other input");
    }
    return em.finish(report, report.status == "ok" ? kExitOk : kExitError);
  } catch (const Error& e) {
    return fail_with(report, em, e);
  }
}

// --- linearize -----------------------------------------------------------------

Json order_records_json(const std::vector<OrderRecord>& records,
                        bool with_phase) {
  Json list = Json::array();
  for (const auto& r : records) {
    Json e;
    e["order"] = r.order;
    if (with_phase) e["phase"] = r.phase == 1 ? "frame" : "chart";
    e["status"] = r.solved ? "solved" : "obstructed";
    e["obstruction_dim"] = r.obstruction_dim;
    list.push_back(std::move(e));
  }
  return list;
}

int run_linearize(const std::string& path, int order, const Emitter& em) {
  RunReport report;
  report.command = "linearize";
  try {
    const std::string text = read_text_file(path);
    report.add_input(path, text);
    const Json j = parse_json_text(text, path);
    const InputKind kind = detect_kind(j);
    if (kind == InputKind::Poisson) {
      const PoissonStructure p = poisson_from_json(j);
      const int target = order > 0 ? order : p.order();
      require(target <= p.order(), ErrorCode::UsageError,
              "--order exceeds the order stored in the file");
      log_step("linearizing poisson structure to order " +
               std::to_string(target));
      const PoissonLinearizationReport lin = linearize_poisson(p, target);
      report.records["kind"] = "poisson";
      report.records["target_order"] = lin.target_order;
      report.records["achieved_order"] = lin.achieved_order;
      report.records["orders"] = order_records_json(lin.records, false);
      if (lin.success) {
        report.records["sign"] = lin.sign;
        if (em.wants_artifacts()) {
          write_text_file(em.artifact(report, ".change.json"),
                          coordinate_change_to_json(lin.change).dump(2) + "\n");
        }
        return em.finish(report, kExitOk);
      }
      report.status = "obstructed";
      report.error = to_string(ErrorCode::Obstructed);
      return em.finish(report, kExitObstructed);
    }
    if (kind == InputKind::Algebroid) {
      const LieAlgebroid a = algebroid_from_json(j);
      const int target = order > 0 ? order : a.order();
      require(target <= a.order(), ErrorCode::UsageError,
              "--order exceeds the order stored in the file");
      log_step("linearizing algebroid to order " + std::to_string(target));
      const AlgebroidLinearizationReport lin = linearize_algebroid(a, target);
      report.records["kind"] = "algebroid";
      report.records["target_order"] = lin.target_order;
      report.records["achieved_order"] = lin.achieved_order;
      report.records["orders"] = order_records_json(lin.records, true);
      if (lin.success) {
        report.records["sign"] = lin.sign;
        if (em.wants_artifacts()) {
          write_text_file(em.artifact(report, ".frame.json"),
                          frame_change_to_json(lin.frame_change).dump(2) +
                              "\n");
          write_text_file(
              em.artifact(report, ".change.json"),
              coordinate_change_to_json(lin.coordinate_change).dump(2) + "\n");
        }
        return em.finish(report, kExitOk);
      }
      report.status = "obstructed";
      report.error = to_string(ErrorCode::Obstructed);
      return em.finish(report, kExitObstructed);
    }
    fail(ErrorCode::UsageError,
         "linearize expects a poisson or algebroid file");
  } catch (const Error& e) {
    return fail_with(report, em, e);
  }
}

// --- average -------------------------------------------------------------------

int run_average_hom(const std::string& group_path, const std::string& map_path,
                    double tol, bool force, const Emitter& em) {
  RunReport report;
  report.command = "average hom";
  try {
    const std::string gtext = read_text_file(group_path);
    report.add_input(group_path, gtext);
    const std::string mtext = read_text_file(map_path);
    report.add_input(map_path, mtext);
    const FiniteGroup group =
        finite_group_from_json(parse_json_text(gtext, group_path));
    const AlmostHomomorphism sigma0 =
        hom_from_json(group, parse_json_text(mtext, map_path));
    log_step("averaging almost homomorphism, |G| = " +
             std::to_string(group.size()));
    const HomAveragingResult res =
        average_to_homomorphism(sigma0, tol, 50, force);
    report.records["defect"] = report_number(res.initial_defect);
    report.records["final_defect"] = report_number(res.final_defect);
    report.records["bound"] = report_number(res.displacement_bound);
    report.records["achieved_distance"] = report_number(res.displacement);
    report.records["sweeps"] = res.sweeps;
    require(force || res.displacement <= res.displacement_bound,
            ErrorCode::NoConvergence,
            "corrected map exceeds the displacement bound 1.36 q");
    if (em.wants_artifacts())
      write_text_file(em.artifact(report, ".corrected.json"),
                      hom_to_json(res.corrected).dump(2) + "\n");
    return em.finish(report, kExitOk);
  } catch (const Error& e) {
    return fail_with(report, em, e);
  }
}

int run_average_rep(const std::string& group_path, const std::string& rep_path,
                    double tol, bool force, const Emitter& em) {
  RunReport report;
  report.command = "average rep";
  try {
    const std::string gtext = read_text_file(group_path);
    report.add_input(group_path, gtext);
    const std::string rtext = read_text_file(rep_path);
    report.add_input(rep_path, rtext);
    const FiniteGroup group =
        finite_group_from_json(parse_json_text(gtext, group_path));
    const RepInput in = rep_from_json(group, parse_json_text(rtext, rep_path));
    log_step("averaging almost representation, dim = " +
             std::to_string(in.dim));
    const RepAveragingResult res = average_to_representation(
        group, in.values, in.norm_bound, in.eps, tol, 50, force);
    report.records["eps"] = report_number(in.eps);
    report.records["norm_bound"] = report_number(in.norm_bound);
    report.records["defect"] = report_number(res.initial_defect);
    report.records["defect_gate"] =
        report_number(in.eps * std::pow(2.0 * in.norm_bound, -9.0));
    report.records["final_defect"] = report_number(res.final_defect);
    report.records["bound"] = report_number(in.eps);
    report.records["achieved_distance"] = report_number(res.displacement);
    report.records["sweeps"] = res.sweeps;
    require(force || res.displacement <= in.eps, ErrorCode::NoConvergence,
            "corrected family exceeds the eps displacement bound");
    if (em.wants_artifacts()) {
      Json out;
      out["dim"] = in.dim;
      out["values"] = rep_values_to_json(res.corrected);
      write_text_file(em.artifact(report, ".corrected.json"),
                      out.dump(2) + "\n");
    }
    return em.finish(report, kExitOk);
  } catch (const Error& e) {
    return fail_with(report, em, e);
  }
}

int run_average_submanifold(const std::string& csv_path,
                            const std::string& sidecar_path, double tol,
                            bool force, const Emitter& em) {
  RunReport report;
  report.command = "average submanifold";
  try {
    const std::string ctext = read_text_file(csv_path);
    report.add_input(csv_path, ctext);
    const std::string stext = read_text_file(sidecar_path);
    report.add_input(sidecar_path, stext);
    const SubmanifoldInput in = submanifold_from_files(
        csv_path, parse_json_text(stext, sidecar_path));
    log_step("averaging submanifold, " +
             std::to_string(in.submanifold.sample_count()) + " samples");
    const SubmanifoldAverage res =
        average_submanifold(in.submanifold, in.ambient, tol, 100, force);
    report.records["epsilon"] = report_number(res.epsilon);
    report.records["hypothesis_gate"] = report_number(1.0 / 20000.0);
    report.records["invariance_residual"] = report_number(res.final_residual);
    report.records["bound"] = report_number(res.displacement_bound);
    report.records["achieved_distance"] = report_number(res.distance_moved);
    report.records["iterations"] = res.iterations;
    require(force || res.distance_moved <= res.displacement_bound,
            ErrorCode::NoConvergence,
            "averaged submanifold exceeds the 136 sqrt(eps) bound");
    if (em.wants_artifacts())
      save_csv(em.artifact(report, ".invariant.csv"),
               submanifold_to_csv_matrix(res.invariant));
    return em.finish(report, kExitOk);
  } catch (const Error& e) {
    return fail_with(report, em, e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal linearization and finite-group averaging toolkit"};
  app.require_subcommand(1);

  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::string output_prefix;
  bool no_timestamp = false;
  app.add_option("--threads", threads,
                 "worker threads for data-parallel loops")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", output_prefix,
                 "artifact path prefix; writes PREFIX.report.json and "
                 "command-specific outputs");
  app.add_flag("--no-timestamp", no_timestamp,
               "omit timestamp and wall time for byte-stable reports");

  std::vector<std::string> check_paths;
  auto* check = app.add_subcommand(
      "check", "validate an input file and print residual summaries");
  check->fallthrough();
  check->add_option("inputs", check_paths, "input file(s)")
      ->required()
      ->expected(1, 2);

  std::string lin_path;
  int lin_order = 0;
  auto* lin = app.add_subcommand(
      "linearize", "normalize a poisson structure or lie algebroid");
  lin->fallthrough();
  lin->add_option("input", lin_path, "poisson or algebroid JSON file")
      ->required();
  lin->add_option("--order", lin_order,
                  "target order (default: the order stored in the file)")
      ->check(CLI::PositiveNumber);

  auto* avg = app.add_subcommand("average",
                                 "correct an almost-structure by averaging");
  avg->fallthrough();
  avg->require_subcommand(1);
  double tol = -1.0;
  bool force = false;
  avg->add_option("--tol", tol,
                  "convergence tolerance (default 1e-12; submanifold 1e-10)");
  avg->add_flag("--force", force, "run despite violated theorem hypotheses");

  std::string hom_group, hom_map;
  auto* hom = avg->add_subcommand("hom", "almost homomorphism into SO/SU");
  hom->fallthrough();
  hom->add_option("group", hom_group, "finite group JSON")->required();
  hom->add_option("map", hom_map, "almost homomorphism JSON")->required();

  std::string rep_group, rep_map;
  auto* rep = avg->add_subcommand("rep", "almost representation by matrices");
  rep->fallthrough();
  rep->add_option("group", rep_group, "finite group JSON")->required();
  rep->add_option("map", rep_map, "almost representation JSON")->required();

  std::string sub_csv, sub_sidecar;
  auto* sub = avg->add_subcommand("submanifold",
                                  "almost invariant curve or patch");
  sub->fallthrough();
  sub->add_option("csv", sub_csv, "sample CSV (coordinates, then frames)")
      ->required();
  sub->add_option("sidecar", sub_sidecar, "ambient/topology/group JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  levi::thread_count().store(std::max(1, threads));
  const Emitter em{output_prefix, !no_timestamp};

  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitError;
  if (*check) {
    code = run_check(check_paths, em);
  } else if (*lin) {
    code = run_linearize(lin_path, lin_order, em);
  } else if (*hom) {
    code = run_average_hom(hom_group, hom_map, tol < 0 ? 1e-12 : tol, force,
                           em);
  } else if (*rep) {
    code = run_average_rep(rep_group, rep_map, tol < 0 ? 1e-12 : tol, force,
                           em);
  } else if (*sub) {
    code = run_average_submanifold(sub_csv, sub_sidecar,
                                   tol < 0 ? 1e-10 : tol, force, em);
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (verbose_logging()) {
    const double ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::cerr << "levi: finished in " << ms << " ms with exit code " << code
              << "\n";
  }
  return code;
}
