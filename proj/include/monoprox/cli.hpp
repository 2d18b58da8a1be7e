#pragma once

// Command-line front end: prox-eval, resolvent-eval, solve and verify.
// Reports are JSON with a fixed field order. Exit codes: 0 success, 2 spec
// error, 3 solver failure, 4 verification failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "monoprox/admm.hpp"
#include "monoprox/composition.hpp"
#include "monoprox/postcomposition.hpp"
#include "monoprox/spec.hpp"
#include "monoprox/verify.hpp"

namespace monoprox {

enum ExitCode : int { exit_ok = 0, exit_spec_error = 2, exit_solver_failure = 3, exit_verification_failure = 4 };

using Json = nlohmann::ordered_json;

namespace detail {

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const ToleranceConfig& t) {
  return Json{{"tol_fix", t.tol_fix},
              {"max_iter", t.max_iter},
              {"tol_admm", t.tol_admm},
              {"admm_max_iter", t.admm_max_iter},
              {"symmetry", t.symmetry},
              {"eigen_floor", t.eigen_floor},
              {"rank_relative", t.rank_relative},
              {"monotone_floor", t.monotone_floor},
              {"divergence_norm", t.divergence_norm}};
}

inline Json to_json(const InnerSolveReport& r) {
  return Json{{"iterations", r.iterations},
              {"final_residual", number_or_null(r.final_residual)},
              {"status", to_string(r.status)}};
}

inline Json to_json(const RunReport& r) {
  Json records = Json::array();
  for (const AdmmRecord& k : r.records)
    records.push_back(Json{{"iteration", k.iteration},
                           {"x_norm", number_or_null(k.x_norm)},
                           {"z_norm", number_or_null(k.z_norm)},
                           {"primal_residual", number_or_null(k.primal_residual)},
                           {"dual_residual", number_or_null(k.dual_residual)},
                           {"attained", k.attained},
                           {"inner_iterations", k.inner_iterations}});
  return Json{{"iterations", r.iterations},
              {"converged", r.converged},
              {"all_updates_attained", r.all_updates_attained},
              {"qualification", to_string(r.qualification)},
              {"warnings", r.warnings},
              {"final_objective", number_or_null(r.final_objective)},
              {"x", to_json(r.x)},
              {"z", to_json(r.z)},
              {"w", to_json(r.w)},
              {"records", records}};
}

inline Json to_json(const SuiteReport& s) {
  Json checks = Json::array();
  for (const IdentityCheck& c : s.checks)
    checks.push_back(Json{{"name", c.name},
                          {"instances", c.instances},
                          {"max_residual", number_or_null(c.max_residual)},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed()},
                          {"error", c.error.empty() ? Json(nullptr) : Json(c.error)}});
  return Json{{"seed", s.seed}, {"count", s.count}, {"all_passed", s.all_passed()}, {"checks", checks}};
}

/// Evaluates one task; fills `report` and returns the exit code. Solver errors
/// propagate to the caller, which records them.
inline int run_prox(const ProblemSpec& spec, Json& report) {
  const ProxTask t = prox_task(spec);
  const ProxResult r = prox_infcomp(t.f, t.l, t.u, t.point, spec.tolerances);
  report["function"] = t.f.name();
  report["qualification"] = to_string(qualification_hint(t.f, t.l, spec.tolerances));
  report["attained"] = r.attained;
  report["representative"] = r.representative ? to_json(*r.representative) : Json(nullptr);
  report["image"] = r.attained ? to_json(r.image) : Json(nullptr);
  report["kernel_complement"] = r.attained ? to_json(r.kernel_complement) : Json(nullptr);
  report["inner"] = to_json(r.report);
  report["explanation"] = r.explanation;
  return r.attained ? exit_ok : exit_solver_failure;
}

inline int run_resolvent(const ProblemSpec& spec, Json& report) {
  const ResolventTask t = resolvent_task(spec);
  const ToleranceConfig& cfg = spec.tolerances;
  CompositionResult r;
  switch (t.kind) {
    case ResolventKind::composed:
      r = resolve_composed(CompositionProblem{t.a, *t.map, t.u, t.route}, t.point, cfg);
      report["kind"] = "composed";
      break;
    case ResolventKind::parallel:
      r = resolvent_parallel_composition(t.a, *t.map, t.u, t.point, t.route, cfg);
      report["kind"] = "parallel";
      break;
    case ResolventKind::metric:
      r.value = metric_resolvent(t.a, t.u, t.point, cfg);
      report["kind"] = "metric";
      break;
    case ResolventKind::parallel_sum:
      r = parallel_sum_resolvent(t.a, *t.b, t.point, cfg);
      report["kind"] = "parallel-sum";
      break;
  }
  if (t.kind != ResolventKind::metric) report["route"] = to_string(r.route);
  report["value"] = to_json(r.value);
  if (t.kind != ResolventKind::metric) report["inner"] = to_json(r.report);
  report["self_check"] = number_or_null(r.self_check);
  return exit_ok;
}

inline int run_solve(const ProblemSpec& spec, Json& report) {
  const SolveTask t = solve_task(spec);
  RunReport partial;
  try {
    const RunReport r = admm_solve(t.f, t.g, t.l, t.u, spec.tolerances, &partial);
    report.update(to_json(r));
    return exit_ok;
  } catch (const Error&) {
    report.update(to_json(partial));
    throw;
  }
}

inline bool write_report(const Json& report, const std::string& out_path, std::ostream& out,
                         std::ostream& err) {
  const std::string text = report.dump(2);
  out << text << '\n';
  if (out_path.empty()) return true;
  std::ofstream f(out_path);
  if (!(f << text << '\n')) {
    err << "error: cannot write '" << out_path << "'\n";
    return false;
  }
  return true;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Generalized proximity operators, composed resolvents and ADMM"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "Also write the report to this file");

  std::string spec_path;
  auto* prox = app.add_subcommand("prox-eval", "Evaluate prox_{f,L}^U at a point");
  prox->add_option("spec", spec_path, "Problem spec file")->required();
  auto* res = app.add_subcommand("resolvent-eval", "Evaluate a composed or parallel resolvent");
  res->add_option("spec", spec_path, "Problem spec file")->required();
  auto* solve = app.add_subcommand("solve", "Run ADMM on min f(x) + g(Lx)");
  solve->add_option("spec", spec_path, "Problem spec file")->required();
  auto* verify = app.add_subcommand("verify", "Run the seeded identity suite");
  std::uint64_t seed = 42;
  int count = 50;
  verify->add_option("--seed", seed, "Generator seed");
  verify->add_option("--count", count, "Instances per identity")->check(CLI::NonNegativeNumber);
  for (auto* sub : {prox, res, solve, verify}) sub->add_option("--out", out_path, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_spec_error;
  }

  const auto start = std::chrono::steady_clock::now();
  Json report;
  int code = exit_ok;

  if (verify->parsed()) {
    report["task"] = "verify";
    const SuiteReport s = check_identity_suite(seed, count);
    report.update(detail::to_json(s));
    code = s.all_passed() ? exit_ok : exit_verification_failure;
  } else {
    const std::string task = prox->parsed() ? "prox-eval" : res->parsed() ? "resolvent-eval" : "solve";
    report["task"] = task;
    report["spec"] = spec_path;
    ProblemSpec spec;
    try {
      spec = parse_spec_file(spec_path);
      report["tolerances"] = detail::to_json(spec.tolerances);
      if (task == "prox-eval") code = detail::run_prox(spec, report);
      else if (task == "resolvent-eval") code = detail::run_resolvent(spec, report);
      else code = detail::run_solve(spec, report);
    } catch (const SpecError& e) {
      err << "error: " << spec_path;
      if (e.line() > 0) err << ":" << e.line() << ":" << e.column();
      err << ": " << e.message() << '\n';
      return exit_spec_error;
    } catch (const Error& e) {
      report["error"] = e.what();
      code = exit_solver_failure;
    } catch (const std::exception& e) {
      report["error"] = std::string("internal error: ") + e.what();
      code = exit_solver_failure;
    }
  }
  report["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!detail::write_report(report, out_path, out, err) && code == exit_ok) code = exit_solver_failure;
  return code;
}

}  // namespace monoprox
