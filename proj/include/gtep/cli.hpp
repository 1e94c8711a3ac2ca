#pragma once

// Command-line front end: solve, evaluate, oracle and validate subcommands.
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 not converged,
// 4 solver failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gtep/ccg.hpp"
#include "gtep/io.hpp"
#include "gtep/oracle.hpp"

namespace gtep {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalid = 2, kExitNotConverged = 3, kExitSolver = 4 };

namespace detail {

inline void print_plan(std::ostream& out, const Report& r) {
  if (r.schedule.empty()) {
    out << "builds: none\n";
    return;
  }
  out << "builds:\n";
  for (const auto& s : r.schedule) {
    out << "  " << s.asset << ' ' << s.id << " at " << s.location << " in period " << s.period << " ("
        << s.invest_cost << " M EUR)\n";
  }
}

inline void print_costs(std::ostream& out, const Report& r) {
  out << "investment npc: " << r.investment_npc() << " M EUR (lines " << r.line_npc << ", generators " << r.gen_npc
      << ")\n";
  out << "operation npc: " << r.operation_npc << " M EUR (load shedding " << r.shedding_npc << ")\n";
  out << "total: " << r.total << " M EUR\n";
}

inline void dump_models(const NetworkCase& c, const CCGTrace& tr, const std::filesystem::path& stem,
                        std::ostream& out) {
  auto write = [&](const std::filesystem::path& p, const mp::MathProgram& prog) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error(p.string() + ": cannot write file");
    mp::write_lp_text(f, prog);
    out << "wrote " << p.string() << '\n';
  };
  write(stem.string() + "_master.lp", build_master(c, tr.pool).program);
  const auto sched = expand_statuses(tr.best_plan, c);
  for (int t = 1; t <= c.horizon(); ++t) {
    write(stem.string() + "_sub_" + std::to_string(t) + ".lp",
          build_dual_subproblem(c, sched.at(t), t, dual_bounds(c, t)).program);
  }
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust transmission and generation expansion planning"};
  app.require_subcommand(1);

  std::string case_path;
  std::string out_path;
  std::string format = "json";
  double epsilon = 0.0;
  int max_iter = 0;
  bool verbose = false;
  bool dump = false;
  std::string plan_path;
  bool compare = false;

  auto* solve = app.add_subcommand("solve", "Run column-and-constraint generation on a case");
  solve->add_option("case", case_path, "Case file")->required();
  solve->add_option("--out", out_path, "Report path");
  solve->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  solve->add_option("--epsilon", epsilon, "Relative gap tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  solve->add_flag("--verbose", verbose, "Print one line per iteration");
  solve->add_flag("--dump-models", dump, "Write the final master and subproblems as LP text");

  auto* evaluate = app.add_subcommand("evaluate", "Cost a build plan at nominal uncertainty");
  evaluate->add_option("case", case_path, "Case file")->required();
  evaluate->add_option("plan", plan_path, "Plan file, or a report holding one")->required();

  auto* oracle = app.add_subcommand("oracle", "Exhaustive reference solve for small cases");
  oracle->add_option("case", case_path, "Case file")->required();
  oracle->add_flag("--compare", compare, "Also run solve and report the difference");

  auto* validate = app.add_subcommand("validate", "Check a case file");
  validate->add_option("case", case_path, "Case file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  out << std::setprecision(10);
  NetworkCase c;
  try {
    c = load_case(case_path);
  } catch (const ValidationError& e) {
    err << "invalid case: " << case_path << '\n';
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kExitInvalid;
  } catch (const CaseFormatError& e) {
    err << "invalid case: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (validate->parsed()) {
    out << "ok: " << case_path << " (" << c.buses.size() << " buses, " << c.lines.size() << " lines, "
        << c.generators.size() << " generators, " << c.demands.size() << " demands, " << c.horizon()
        << " periods)\n";
    return kExitOk;
  }

  try {
    const auto& backend = mp::backend_from_env();

    if (evaluate->parsed()) {
      InvestmentPlan plan;
      try {
        plan = load_plan(plan_path, c);
        if (const auto why = plan_violation(plan, c); !why.empty()) throw CaseFormatError("plan rejected: " + why);
      } catch (const CaseFormatError& e) {
        err << "invalid plan: " << e.what() << '\n';
        return kExitInvalid;
      }
      const auto r = plan_report(c, plan, nominal_realizations(c, expand_statuses(plan, c)), backend);
      detail::print_plan(out, r);
      for (const auto& p : r.periods) {
        out << "period " << p.period << ": operation " << p.c_op << " EUR, shedding " << p.shed_cost << " EUR\n";
      }
      detail::print_costs(out, r);
      return kExitOk;
    }

    if (oracle->parsed()) {
      const auto sol = oracle_global_solve(c, {}, backend);
      out << "oracle objective: " << sol.objective << " M EUR over " << sol.plans_evaluated << " plans\n";
      out << "oracle plan: " << plan_to_json(sol.plan, c).dump() << '\n';
      if (compare) {
        const auto tr = ccg_solve(c, [&] {
          auto cfg = CCGConfig::from_case(c);
          cfg.backend = &backend;
          return cfg;
        }());
        out << "solve objective: " << tr.z_up << " M EUR in " << tr.iteration_count() << " iterations\n";
        out << "relative difference: " << std::abs(tr.z_up - sol.objective) / std::max(1.0, std::abs(sol.objective))
            << '\n';
        if (!tr.converged) return kExitNotConverged;
      }
      return kExitOk;
    }

    // solve
    auto cfg = CCGConfig::from_case(c);
    if (epsilon > 0.0) cfg.epsilon = epsilon;
    if (max_iter > 0) cfg.max_iterations = max_iter;
    cfg.verbose = verbose;
    cfg.log = &out;
    cfg.backend = &backend;
    const auto tr = ccg_solve(c, cfg);
    const auto r = make_report(c, tr, backend);
    out << (tr.converged ? "converged" : "not converged") << " after " << tr.iteration_count()
        << " iterations: lower " << tr.z_lo << ", upper " << tr.z_up << ", gap " << tr.gap << '\n';
    detail::print_plan(out, r);
    detail::print_costs(out, r);
    if (!out_path.empty()) {
      const auto fmt = format == "csv" ? ReportFormat::csv : ReportFormat::json;
      write_report(r, out_path, fmt);
      for (const auto& p : report_paths(out_path, fmt)) out << "wrote " << p.string() << '\n';
    }
    if (dump) {
      auto stem = std::filesystem::path(out_path.empty() ? case_path : out_path);
      stem.replace_extension();
      if (out_path.empty()) stem = stem.filename();
      detail::dump_models(c, tr, stem, out);
    }
    return tr.converged ? kExitOk : kExitNotConverged;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const EnumerationLimit& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace gtep
