#pragma once

// Per-period DC optimal power flow with load shedding, for fixed statuses and a
// fixed uncertainty realization, and full-plan cost evaluation.
//
// Row layout (dual in brackets), built lines only:
//   balance_n   sum g - sum f_out + sum f_in + sum r - sum p = 0    [lambda]
//   flow_k      f - b theta_o + b theta_r = 0                       [phi]
//   slack       theta_slack = 0                                     [chi]
//   fmax_k      f <= fmax  /  fmin_k  f >= -fmax                    [phi_hat / phi_check]
//   amax_n      theta <= pi / amin_n  theta >= -pi (non-slack)      [xi_hat / xi_check]
//   demand_j    p = u^D                                             [alpha]
//   gcap_i      g <= u^G * status                                   [varphi_g]
//   shed_j      r <= e * u^D                                        [varphi_d]
// Duals follow d(cost)/d(rhs), which gives the sign pattern
// phi_hat, xi_hat, varphi <= 0 and phi_check, xi_check >= 0.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtep/model.hpp"
#include "gtep/mp/backend.hpp"

namespace gtep {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;

/// The OPF program plus the ids of every variable and row family.
/// Index -1 marks an absent entry (unbuilt line, slack bus angle bound).
struct OpfModel {
  mp::MathProgram program;
  int period = 1;
  std::vector<int> var_g, var_r, var_p, var_theta, var_f;
  std::vector<int> row_balance, row_flow, row_fmax, row_fmin, row_amax, row_amin;
  std::vector<int> row_demand, row_gcap, row_shed;
  int row_slack = -1;
};

struct Dispatch {
  std::vector<double> gen_mw;
  std::vector<double> demand_mw;
  std::vector<double> shed_mw;
  std::vector<double> angle_rad;
  std::vector<double> flow_mw;
};

struct DualSolution {
  std::vector<double> lambda;
  std::vector<double> phi;
  double chi = 0.0;
  std::vector<double> phi_hat;
  std::vector<double> phi_check;
  std::vector<double> xi_hat;
  std::vector<double> xi_check;
  std::vector<double> alpha_d;
  std::vector<double> varphi_g;
  std::vector<double> varphi_d;
};

struct OpfResult {
  Dispatch dispatch;
  DualSolution dual;
  double cost = 0.0;       // EUR, sigma-weighted, undiscounted
  double dual_cost = 0.0;  // sum rhs * dual
};

/// Builds the operational LP. Costs in the objective are multiplied by
/// `cost_scale` (sigma_hours by default, giving EUR).
inline OpfModel build_opf(const NetworkCase& c, const PeriodStatus& status, const UncertaintyRealization& u,
                          int t, double cost_scale) {
  const Topology topo(c);
  const double sigma = cost_scale;
  OpfModel m;
  m.period = t;
  m.program = mp::MathProgram("opf_t" + std::to_string(t));
  auto& p = m.program;
  const std::size_t nb = c.buses.size();

  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto v = p.add_variable("g_" + c.generators[i].id, 0.0, mp::kInf);
    p.set_objective_coef(v, sigma * c.generators[i].op_cost);
    m.var_g.push_back(v.index);
  }
  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    const auto r = p.add_variable("r_" + c.demands[j].id, 0.0, mp::kInf);
    p.set_objective_coef(r, sigma * c.demands[j].shed_cost);
    m.var_r.push_back(r.index);
    m.var_p.push_back(p.add_variable("p_" + c.demands[j].id, 0.0, mp::kInf).index);
  }
  for (std::size_t n = 0; n < nb; ++n) {
    m.var_theta.push_back(p.add_variable("theta_" + c.buses[n].id, -mp::kInf, mp::kInf).index);
  }
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    m.var_f.push_back(status.line.at(k) ? p.add_variable("f_" + c.lines[k].id, -mp::kInf, mp::kInf).index : -1);
  }

  std::vector<std::vector<mp::Term>> balance(nb);
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    balance[static_cast<std::size_t>(topo.gen_bus[i])].push_back({mp::VarId{m.var_g[i]}, 1.0});
  }
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (m.var_f[k] < 0) continue;
    balance[static_cast<std::size_t>(topo.line_from[k])].push_back({mp::VarId{m.var_f[k]}, -1.0});
    balance[static_cast<std::size_t>(topo.line_to[k])].push_back({mp::VarId{m.var_f[k]}, 1.0});
  }
  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    balance[static_cast<std::size_t>(topo.dem_bus[j])].push_back({mp::VarId{m.var_r[j]}, 1.0});
    balance[static_cast<std::size_t>(topo.dem_bus[j])].push_back({mp::VarId{m.var_p[j]}, -1.0});
  }
  for (std::size_t n = 0; n < nb; ++n) {
    m.row_balance.push_back(p.add_constraint("balance_" + c.buses[n].id, balance[n], mp::RowSense::eq, 0.0).index);
  }

  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (m.var_f[k] < 0) {
      m.row_flow.push_back(-1);
      m.row_fmax.push_back(-1);
      m.row_fmin.push_back(-1);
      continue;
    }
    const auto& l = c.lines[k];
    const mp::VarId f{m.var_f[k]};
    m.row_flow.push_back(p.add_constraint("flow_" + l.id,
                                          {{f, 1.0},
                                           {mp::VarId{m.var_theta[static_cast<std::size_t>(topo.line_from[k])]}, -l.susceptance},
                                           {mp::VarId{m.var_theta[static_cast<std::size_t>(topo.line_to[k])]}, l.susceptance}},
                                          mp::RowSense::eq, 0.0)
                             .index);
    m.row_fmax.push_back(p.add_constraint("fmax_" + l.id, {{f, 1.0}}, mp::RowSense::le, l.capacity_mw).index);
    m.row_fmin.push_back(p.add_constraint("fmin_" + l.id, {{f, 1.0}}, mp::RowSense::ge, -l.capacity_mw).index);
  }

  m.row_slack = p.add_constraint("slack_angle", {{mp::VarId{m.var_theta[static_cast<std::size_t>(topo.slack)]}, 1.0}},
                                 mp::RowSense::eq, 0.0)
                    .index;
  for (std::size_t n = 0; n < nb; ++n) {
    if (static_cast<int>(n) == topo.slack) {
      m.row_amax.push_back(-1);
      m.row_amin.push_back(-1);
      continue;
    }
    const mp::VarId th{m.var_theta[n]};
    m.row_amax.push_back(p.add_constraint("amax_" + c.buses[n].id, {{th, 1.0}}, mp::RowSense::le, kPi).index);
    m.row_amin.push_back(p.add_constraint("amin_" + c.buses[n].id, {{th, 1.0}}, mp::RowSense::ge, -kPi).index);
  }

  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    const auto& d = c.demands[j];
    m.row_demand.push_back(
        p.add_constraint("demand_" + d.id, {{mp::VarId{m.var_p[j]}, 1.0}}, mp::RowSense::eq, u.u_dem.at(j)).index);
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    m.row_gcap.push_back(p.add_constraint("gcap_" + c.generators[i].id, {{mp::VarId{m.var_g[i]}, 1.0}},
                                          mp::RowSense::le, u.u_gen.at(i) * status.gen.at(i))
                             .index);
  }
  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    const auto& d = c.demands[j];
    m.row_shed.push_back(p.add_constraint("shed_" + d.id, {{mp::VarId{m.var_r[j]}, 1.0}}, mp::RowSense::le,
                                          d.shed_limit(t) * u.u_dem.at(j))
                             .index);
  }
  return m;
}

inline OpfModel build_opf(const NetworkCase& c, const PeriodStatus& status, const UncertaintyRealization& u, int t) {
  return build_opf(c, status, u, t, c.planning.sigma_hours);
}

inline OpfResult solve_opf(const OpfModel& m, const mp::SolverBackend& backend = mp::builtin_backend()) {
  const auto out = backend.solve_lp(m.program);
  if (out.status == mp::SolveStatus::infeasible) {
    std::string names;
    for (const auto& r : out.infeasible_rows) names += (names.empty() ? "" : ", ") + r;
    throw SolverError("operational problem " + m.program.name() + " infeasible (rows: " +
                      (names.empty() ? "unknown" : names) + ")");
  }
  if (!out.optimal()) {
    throw SolverError("operational problem " + m.program.name() + ": " + mp::to_string(out.status));
  }
  auto val = [&](int v) { return v < 0 ? 0.0 : out.primal[static_cast<std::size_t>(v)]; };
  auto dual = [&](int r) { return r < 0 ? 0.0 : out.duals[static_cast<std::size_t>(r)]; };
  OpfResult res;
  res.cost = out.objective;
  for (int v : m.var_g) res.dispatch.gen_mw.push_back(val(v));
  for (int v : m.var_p) res.dispatch.demand_mw.push_back(val(v));
  for (int v : m.var_r) res.dispatch.shed_mw.push_back(val(v));
  for (int v : m.var_theta) res.dispatch.angle_rad.push_back(val(v));
  for (int v : m.var_f) res.dispatch.flow_mw.push_back(val(v));

  auto& d = res.dual;
  for (int r : m.row_balance) d.lambda.push_back(dual(r));
  for (int r : m.row_flow) d.phi.push_back(dual(r));
  d.chi = dual(m.row_slack);
  for (int r : m.row_fmax) d.phi_hat.push_back(dual(r));
  for (int r : m.row_fmin) d.phi_check.push_back(dual(r));
  for (int r : m.row_amax) d.xi_hat.push_back(dual(r));
  for (int r : m.row_amin) d.xi_check.push_back(dual(r));
  for (int r : m.row_demand) d.alpha_d.push_back(dual(r));
  for (int r : m.row_gcap) d.varphi_g.push_back(dual(r));
  for (int r : m.row_shed) d.varphi_d.push_back(dual(r));

  // Nonnegative columns sit at bound zero or carry zero reduced cost, so the
  // dual objective is the rhs-weighted dual sum.
  double dual_obj = 0.0;
  const auto& rows = m.program.constraints();
  for (std::size_t i = 0; i < rows.size(); ++i) dual_obj += rows[i].rhs * out.duals[i];
  res.dual_cost = dual_obj;
  if (std::abs(dual_obj - res.cost) > 1e-7 * std::max(1.0, std::abs(res.cost))) {
    throw SolverError("strong duality check failed on " + m.program.name() + ": primal " +
                      std::to_string(res.cost) + " vs dual " + std::to_string(dual_obj));
  }
  return res;
}

/// Worst-case-free operating cost of one period at a given realization.
inline double opf_cost(const NetworkCase& c, const PeriodStatus& status, const UncertaintyRealization& u, int t,
                       const mp::SolverBackend& backend = mp::builtin_backend()) {
  return solve_opf(build_opf(c, status, u, t), backend).cost;
}

struct PeriodBreakdown {
  int period = 1;
  double investment = 0.0;    // M EUR, undiscounted
  double c_op = 0.0;          // EUR, sigma-weighted, undiscounted
  double shed_cost = 0.0;     // EUR, sigma-weighted, undiscounted
  double discounted = 0.0;    // M EUR, contribution to the total
};

struct PlanEvaluation {
  InvestmentNpc investment;
  std::vector<PeriodBreakdown> periods;
  double operation_npc = 0.0;  // M EUR
  double total = 0.0;          // M EUR
};

/// Net present cost of a plan under one realization per period.
inline PlanEvaluation evaluate_plan(const NetworkCase& c, const InvestmentPlan& plan,
                                    const std::vector<UncertaintyRealization>& realizations,
                                    const mp::SolverBackend& backend = mp::builtin_backend()) {
  if (const auto why = plan_violation(plan, c); !why.empty()) throw std::invalid_argument("plan rejected: " + why);
  if (static_cast<int>(realizations.size()) != c.horizon()) {
    throw std::invalid_argument("evaluate_plan: need one realization per period");
  }
  const auto sched = expand_statuses(plan, c);
  PlanEvaluation ev;
  ev.investment = investment_npc(plan, c);
  for (int t = 1; t <= c.horizon(); ++t) {
    const auto& u = realizations[static_cast<std::size_t>(t - 1)];
    const auto st = sched.at(t);
    const auto res = solve_opf(build_opf(c, st, u, t), backend);
    PeriodBreakdown pb;
    pb.period = t;
    pb.investment = period_investment(plan, c, t);
    pb.c_op = res.cost;
    for (std::size_t j = 0; j < c.demands.size(); ++j) {
      pb.shed_cost += c.planning.sigma_hours * c.demands[j].shed_cost * res.dispatch.shed_mw[j];
    }
    const double df = discount_factor(c.planning.discount_rate, t);
    const double op = discounted_operation(c.planning, t, res.cost);
    pb.discounted = df * pb.investment + op;
    ev.operation_npc += op;
    ev.total += pb.discounted;
    ev.periods.push_back(pb);
  }
  return ev;
}

/// Nominal realizations for every period of a schedule.
inline std::vector<UncertaintyRealization> nominal_realizations(const NetworkCase& c, const StatusSchedule& s) {
  std::vector<UncertaintyRealization> out;
  for (int t = 1; t <= c.horizon(); ++t) out.push_back(nominal_realization(c, s.at(t), t));
  return out;
}

}  // namespace gtep
