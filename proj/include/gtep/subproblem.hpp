#pragma once

// Per-period worst-case subproblem: the operational LP is replaced by its dual
// and maximized jointly over the binary deviation indicators of the budgeted
// uncertainty set. Each product of a deviation indicator with a dual variable
// is linearized exactly with bounds from dual_bounds.
//
// The dual is formed column by column from the operational program, so its
// feasibility rows are exactly the reduced-cost conditions of build_opf.
// Internally costs are divided by sigma * c_ref (c_ref = largest unit cost);
// values are scaled back before they leave this header.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtep/model.hpp"
#include "gtep/mp/backend.hpp"
#include "gtep/opf.hpp"

namespace gtep {

/// Finite bounds on the dual variables that multiply deviation indicators,
/// in EUR per MW (sigma-weighted). Flow and angle bounds are reported only.
struct LinearizationBounds {
  double lambda_abs = 0.0;
  double alpha_abs = 0.0;
  double varphi_g_lower = 0.0;
  double varphi_d_lower = 0.0;
  double phi_abs = 0.0;
  double xi_abs = 0.0;

  [[nodiscard]] LinearizationBounds scaled(double f) const {
    return {lambda_abs * f, alpha_abs * f, varphi_g_lower * f, varphi_d_lower * f, phi_abs * f, xi_abs * f};
  }
};

inline LinearizationBounds dual_bounds(const NetworkCase& c, int /*t*/) {
  double max_shed = 0.0;
  double max_gen = 0.0;
  for (const auto& d : c.demands) max_shed = std::max(max_shed, d.shed_cost);
  for (const auto& g : c.generators) max_gen = std::max(max_gen, g.op_cost);
  const double sigma = c.planning.sigma_hours;
  LinearizationBounds b;
  b.lambda_abs = sigma * max_shed;
  b.alpha_abs = sigma * max_shed;
  b.varphi_g_lower = c.demands.empty() ? 0.0 : -sigma * (max_shed + max_gen);
  b.varphi_d_lower = -sigma * max_shed;
  b.phi_abs = 2.0 * b.lambda_abs;
  double sum_b = 0.0;
  for (const auto& l : c.lines) sum_b += l.susceptance;
  b.xi_abs = sum_b * b.phi_abs;
  return b;
}

struct DualSubproblem {
  mp::MathProgram program;
  OpfModel primal;                // operational program the dual was taken from
  std::vector<int> dual_of_row;   // dual variable per primal row
  std::vector<int> z_gen;         // -1 when the indicator cannot deviate
  std::vector<int> z_dem;
  /// Bounded dual variables: (variable, lower, upper) in scaled units.
  struct Bounded {
    int var;
    double lower;
    double upper;
  };
  std::vector<Bounded> bounded;
  double value_scale = 1.0;  // scaled objective -> EUR
  int gamma_g = 0;
  int gamma_d = 0;
};

inline double cost_reference(const NetworkCase& c) {
  double r = 0.0;
  for (const auto& d : c.demands) r = std::max(r, d.shed_cost);
  for (const auto& g : c.generators) r = std::max(r, g.op_cost);
  return r > 0.0 ? r : 1.0;
}

inline DualSubproblem build_dual_subproblem(const NetworkCase& c, const PeriodStatus& status, int t,
                                            const LinearizationBounds& bounds) {
  const double cref = cost_reference(c);
  const double vscale = c.planning.sigma_hours * cref;
  DualSubproblem sp;
  sp.value_scale = vscale;
  sp.gamma_g = gamma_g_for(c, status);
  sp.gamma_d = c.planning.gamma_d;
  sp.primal = build_opf(c, status, nominal_realization(c, status, t), t, 1.0 / cref);
  const auto& op = sp.primal.program;
  auto& p = sp.program;
  p = mp::MathProgram("worst_case_t" + std::to_string(t));
  p.set_objective_sense(mp::ObjSense::maximize);

  const auto& rows = op.constraints();
  for (const auto& row : rows) {
    double lo = -mp::kInf;
    double up = mp::kInf;
    if (row.sense == mp::RowSense::le) up = 0.0;
    if (row.sense == mp::RowSense::ge) lo = 0.0;
    sp.dual_of_row.push_back(p.add_variable("y_" + row.name, lo, up).index);
  }
  // Column j of the primal becomes one dual feasibility row.
  std::vector<std::vector<mp::Term>> cols(static_cast<std::size_t>(op.num_variables()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& term : rows[i].terms) {
      cols[static_cast<std::size_t>(term.var.index)].push_back({mp::VarId{sp.dual_of_row[i]}, term.coef});
    }
  }
  for (int j = 0; j < op.num_variables(); ++j) {
    const auto& v = op.variables()[static_cast<std::size_t>(j)];
    const double cj = op.objective()[static_cast<std::size_t>(j)];
    const bool free_col = v.lower == -mp::kInf && v.upper == mp::kInf;
    if (!free_col && !(v.lower == 0.0 && v.upper == mp::kInf)) {
      throw std::logic_error("dualization expects nonnegative or free columns");
    }
    p.add_constraint("dual_" + v.name, cols[static_cast<std::size_t>(j)],
                     free_col ? mp::RowSense::eq : mp::RowSense::le, cj);
  }

  // Rows whose rhs does not depend on the deviation indicators.
  std::vector<bool> uncertain(rows.size(), false);
  for (int r : sp.primal.row_demand) uncertain[static_cast<std::size_t>(r)] = true;
  for (int r : sp.primal.row_gcap) uncertain[static_cast<std::size_t>(r)] = true;
  for (int r : sp.primal.row_shed) uncertain[static_cast<std::size_t>(r)] = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!uncertain[i] && rows[i].rhs != 0.0) p.set_objective_coef(mp::VarId{sp.dual_of_row[i]}, rows[i].rhs);
  }

  const auto scaled = bounds.scaled(1.0 / vscale);
  auto bound_var = [&](int var, double lo, double up) {
    const auto& v = p.variable(mp::VarId{var});
    lo = std::max(lo, v.lower);
    up = std::min(up, v.upper);
    p.set_bounds(mp::VarId{var}, lo, up);
    sp.bounded.push_back({var, lo, up});
  };
  // w = z * v, exact for binary z and v in [lo, up].
  auto product = [&](const std::string& name, mp::VarId z, int var, double lo, double up) {
    const mp::VarId v{var};
    const auto w = p.add_variable("w_" + name, std::min(lo, 0.0), std::max(up, 0.0));
    p.add_constraint("mc1_" + name, {{w, 1.0}, {z, -lo}}, mp::RowSense::ge, 0.0);
    p.add_constraint("mc2_" + name, {{w, 1.0}, {z, -up}}, mp::RowSense::le, 0.0);
    p.add_constraint("mc3_" + name, {{w, 1.0}, {v, -1.0}, {z, -up}}, mp::RowSense::ge, -up);
    p.add_constraint("mc4_" + name, {{w, 1.0}, {v, -1.0}, {z, -lo}}, mp::RowSense::le, -lo);
    return w;
  };

  std::vector<mp::Term> budget_g;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto& g = c.generators[i];
    const int y = sp.dual_of_row[static_cast<std::size_t>(sp.primal.row_gcap[i])];
    const double active = status.gen.at(i);
    if (active == 0.0) {
      sp.z_gen.push_back(-1);
      continue;
    }
    p.set_objective_coef(mp::VarId{y}, g.cap_nominal_mw);
    if (g.cap_deviation_mw <= 0.0 || sp.gamma_g == 0) {
      sp.z_gen.push_back(-1);
      continue;
    }
    const auto z = p.add_binary("zg_" + g.id);
    sp.z_gen.push_back(z.index);
    budget_g.push_back({z, 1.0});
    bound_var(y, scaled.varphi_g_lower, 0.0);
    const auto w = product("g_" + g.id, z, y, scaled.varphi_g_lower, 0.0);
    p.set_objective_coef(w, -g.cap_deviation_mw);
  }
  std::vector<mp::Term> budget_d;
  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    const auto& d = c.demands[j];
    const int ya = sp.dual_of_row[static_cast<std::size_t>(sp.primal.row_demand[j])];
    const int yd = sp.dual_of_row[static_cast<std::size_t>(sp.primal.row_shed[j])];
    const double nominal = d.nominal_load(t);
    const double dev = d.load_deviation_mw * d.dispersion_factor(t);
    const double e = d.shed_limit(t);
    p.set_objective_coef(mp::VarId{ya}, nominal);
    p.set_objective_coef(mp::VarId{yd}, e * nominal);
    if (dev <= 0.0 || sp.gamma_d == 0) {
      sp.z_dem.push_back(-1);
      continue;
    }
    const auto z = p.add_binary("zd_" + d.id);
    sp.z_dem.push_back(z.index);
    budget_d.push_back({z, 1.0});
    bound_var(ya, -scaled.alpha_abs, scaled.alpha_abs);
    const auto wa = product("a_" + d.id, z, ya, -scaled.alpha_abs, scaled.alpha_abs);
    p.set_objective_coef(wa, dev);
    if (e > 0.0) {
      bound_var(yd, scaled.varphi_d_lower, 0.0);
      const auto wd = product("d_" + d.id, z, yd, scaled.varphi_d_lower, 0.0);
      p.set_objective_coef(wd, e * dev);
    }
  }
  if (!budget_g.empty()) p.add_constraint("budget_g", budget_g, mp::RowSense::le, sp.gamma_g);
  if (!budget_d.empty()) p.add_constraint("budget_d", budget_d, mp::RowSense::le, sp.gamma_d);
  return sp;
}

struct WorstCase {
  UncertaintyRealization realization;
  double c_op = 0.0;  // EUR, sigma-weighted
  DualSolution dual;
  double mip_value = 0.0;  // EUR, value of the dualized program
  int escalations = 0;
  long nodes = 0;
};

struct SubproblemOptions {
  const mp::SolverBackend* backend = nullptr;
  double rel_tol = 1e-6;
  int max_escalations = 3;
  double escalation_factor = 10.0;
  double initial_bound_factor = 1.0;
};

class BigMError : public SolverError {
 public:
  using SolverError::SolverError;
};

inline WorstCase solve_subproblem(const NetworkCase& c, const PeriodStatus& status, int t,
                                  const SubproblemOptions& opt = {}) {
  const auto& backend = opt.backend ? *opt.backend : mp::builtin_backend();
  LinearizationBounds bounds = dual_bounds(c, t).scaled(opt.initial_bound_factor);
  std::string last_issue;
  for (int round = 0; round <= opt.max_escalations; ++round) {
    const auto sp = build_dual_subproblem(c, status, t, bounds);
    const auto out = backend.solve_mip(sp.program);
    if (out.status == mp::SolveStatus::unbounded) {
      throw SolverError("worst-case problem for period " + std::to_string(t) +
                        " is unbounded: some realization leaves the operational problem infeasible");
    }
    if (!out.optimal()) {
      throw SolverError("worst-case problem for period " + std::to_string(t) + ": " + mp::to_string(out.status));
    }
    std::vector<int> zg(c.generators.size(), 0);
    std::vector<int> zd(c.demands.size(), 0);
    for (std::size_t i = 0; i < zg.size(); ++i) {
      if (sp.z_gen[i] >= 0) zg[i] = static_cast<int>(std::lround(out.primal[static_cast<std::size_t>(sp.z_gen[i])]));
    }
    for (std::size_t j = 0; j < zd.size(); ++j) {
      if (sp.z_dem[j] >= 0) zd[j] = static_cast<int>(std::lround(out.primal[static_cast<std::size_t>(sp.z_dem[j])]));
    }
    WorstCase wc;
    wc.realization = realize_uncertainty(c, status, zg, zd, t);
    wc.mip_value = out.objective * sp.value_scale;
    wc.escalations = round;
    wc.nodes = out.nodes;
    const auto check = solve_opf(build_opf(c, status, wc.realization, t), backend);
    wc.c_op = check.cost;
    wc.dual = check.dual;

    const double tol = opt.rel_tol * std::max(1.0, std::abs(wc.c_op));
    if (wc.mip_value > wc.c_op + tol) {
      throw SolverError("worst-case value " + std::to_string(wc.mip_value) + " exceeds operating cost " +
                        std::to_string(wc.c_op) + " at its own realization");
    }
    // A bound is active when relaxing it would raise the value at this vertex
    // (value below the primal cost), or when the operational duals at the
    // vertex fall outside it. Degenerate duals parked on a bound with zero
    // objective weight do not count.
    std::ostringstream outside;
    const double slack = 1e-7 * std::max(1.0, std::abs(bounds.lambda_abs));
    for (std::size_t j = 0; j < c.demands.size(); ++j) {
      if (sp.z_dem[j] < 0) continue;
      if (std::abs(wc.dual.alpha_d[j]) > bounds.alpha_abs + slack) outside << " alpha_" << c.demands[j].id;
      if (wc.dual.varphi_d[j] < bounds.varphi_d_lower - slack) outside << " varphi_d_" << c.demands[j].id;
    }
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
      if (sp.z_gen[i] < 0) continue;
      if (wc.dual.varphi_g[i] < bounds.varphi_g_lower - slack) outside << " varphi_g_" << c.generators[i].id;
    }
    if (wc.mip_value >= wc.c_op - tol && outside.str().empty()) return wc;
    std::ostringstream why;
    why << "period " << t << ": value " << wc.mip_value << " vs operating cost " << wc.c_op;
    if (!outside.str().empty()) why << ", duals outside bounds:" << outside.str();
    last_issue = why.str();
    bounds = bounds.scaled(opt.escalation_factor);
  }
  throw BigMError("big-M too tight (" + last_issue + ")");
}

/// Worst case for every period of a schedule.
inline std::vector<WorstCase> solve_all_subproblems(const NetworkCase& c, const StatusSchedule& s,
                                                    const SubproblemOptions& opt = {}) {
  std::vector<WorstCase> out;
  for (int t = 1; t <= c.horizon(); ++t) out.push_back(solve_subproblem(c, s.at(t), t, opt));
  return out;
}

}  // namespace gtep
