#pragma once

// Column-and-constraint generation: alternate the investment master (lower
// bound) with the per-period worst-case subproblems (upper bound) until the
// relative gap closes.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gtep/master.hpp"
#include "gtep/model.hpp"
#include "gtep/subproblem.hpp"

namespace gtep {

struct CCGConfig {
  double epsilon = 1e-6;
  int max_iterations = 100;
  bool verbose = false;
  std::ostream* log = nullptr;  // progress lines when verbose
  const mp::SolverBackend* backend = nullptr;
  SubproblemOptions subproblem{};

  static CCGConfig from_case(const NetworkCase& c) {
    CCGConfig cfg;
    if (c.ccg) {
      cfg.epsilon = c.ccg->epsilon;
      cfg.max_iterations = c.ccg->max_iterations;
    }
    return cfg;
  }
};

/// (z_up - z_lo) / max(|z_up|, 1); crossed bounds beyond round-off are a bug.
inline double relative_gap(double z_up, double z_lo) {
  const double denom = std::max(std::abs(z_up), 1.0);
  if (z_up < z_lo - 1e-7 * denom) {
    throw std::logic_error("crossed bounds: upper " + std::to_string(z_up) + " below lower " + std::to_string(z_lo));
  }
  return std::max(0.0, z_up - z_lo) / denom;
}

struct CCGIteration {
  int iteration = 0;
  InvestmentPlan plan;
  double z_lo = 0.0;       // M EUR
  double z_up = 0.0;       // M EUR, this iteration's plan
  double best_z_up = 0.0;  // M EUR, minimum so far
  double gap = 0.0;
  std::vector<double> c_op;  // EUR per period, worst case of this plan
  int new_scenarios = 0;
  std::vector<UncertaintyRealization> added;  // scenarios this iteration put in the pool
  double seconds = 0.0;
};

struct CCGTrace {
  std::vector<CCGIteration> iterations;
  InvestmentPlan best_plan;
  std::vector<WorstCase> best_worst_cases;
  double z_lo = 0.0;
  double z_up = 0.0;
  double gap = 0.0;
  bool converged = false;
  ScenarioPool pool;

  [[nodiscard]] int iteration_count() const { return static_cast<int>(iterations.size()); }
  [[nodiscard]] double objective() const { return z_up; }
};

inline CCGTrace ccg_solve(const NetworkCase& c, const CCGConfig& cfg = {}) {
  require_valid(c);
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("ccg: epsilon must be positive");
  if (cfg.max_iterations < 1) throw std::invalid_argument("ccg: max_iterations must be positive");
  const auto& backend = cfg.backend ? *cfg.backend : mp::builtin_backend();
  auto sub_opt = cfg.subproblem;
  sub_opt.backend = &backend;

  CCGTrace tr;
  tr.pool = ScenarioPool(c.horizon());
  bool have_up = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    const auto ms = solve_master(build_master(c, tr.pool), c, backend);
    if (it > 1 && ms.lower_bound < tr.z_lo - 1e-9 * std::max(1.0, std::abs(tr.z_lo))) {
      throw std::logic_error("lower bound decreased between iterations");
    }
    tr.z_lo = std::max(tr.z_lo, ms.lower_bound);

    CCGIteration rec;
    rec.iteration = it;
    rec.plan = ms.plan;
    rec.z_lo = tr.z_lo;
    std::vector<WorstCase> worst;
    double z_up = investment_npc(ms.plan, c).total();
    for (int t = 1; t <= c.horizon(); ++t) {
      worst.push_back(solve_subproblem(c, ms.statuses.at(t), t, sub_opt));
      rec.c_op.push_back(worst.back().c_op);
      z_up += discounted_operation(c.planning, t, worst.back().c_op);
    }
    rec.z_up = z_up;
    if (!have_up || z_up < tr.z_up) {
      tr.z_up = z_up;
      tr.best_plan = ms.plan;
      tr.best_worst_cases = worst;
      have_up = true;
    }
    rec.best_z_up = tr.z_up;
    tr.gap = relative_gap(tr.z_up, tr.z_lo);
    rec.gap = tr.gap;
    for (const auto& w : worst) {
      if (tr.pool.add(w.realization)) rec.added.push_back(w.realization);
    }
    rec.new_scenarios = static_cast<int>(rec.added.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    tr.iterations.push_back(rec);

    if (cfg.verbose && cfg.log) {
      std::ostringstream line;
      line << "iter " << it << std::setprecision(10) << "  z_lo " << tr.z_lo << "  z_up " << tr.z_up << "  gap "
           << std::setprecision(3) << tr.gap << "\n";
      *cfg.log << line.str();
    }
    if (tr.gap <= cfg.epsilon) {
      tr.converged = true;
      break;
    }
    if (rec.new_scenarios == 0) {
      throw SolverError("column-and-constraint generation stalled: no new scenario with gap " +
                        std::to_string(tr.gap));
    }
  }
  return tr;
}

}  // namespace gtep
