#pragma once

// Investment master problem: build binaries for every candidate and period,
// first-stage logic, and one operational block per pooled scenario and period
// whose sigma-weighted cost bounds gamma_t from below.
//
// A pooled scenario is only binding on plans whose uncertainty set contains it.
// The generation budget grows with the number of built candidate units, so a
// scenario that deviates more generators than the base budget carries an
// activation binary v: its cut may be dropped (v = 1) only when the number of
// its deviating units that are active exceeds the plan's budget.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gtep/model.hpp"
#include "gtep/mp/backend.hpp"
#include "gtep/opf.hpp"

namespace gtep {

/// Worst-case realizations gathered so far, per period (append-only).
struct ScenarioPool {
  std::vector<std::vector<UncertaintyRealization>> by_period;

  explicit ScenarioPool(int horizon = 0) : by_period(static_cast<std::size_t>(horizon)) {}

  [[nodiscard]] bool contains(const UncertaintyRealization& u) const {
    const auto& v = by_period.at(static_cast<std::size_t>(u.period - 1));
    return std::find(v.begin(), v.end(), u) != v.end();
  }
  /// Appends unless already present; returns whether it was new.
  bool add(const UncertaintyRealization& u) {
    if (contains(u)) return false;
    by_period.at(static_cast<std::size_t>(u.period - 1)).push_back(u);
    return true;
  }
  [[nodiscard]] std::size_t size() const {
    std::size_t n = 0;
    for (const auto& v : by_period) n += v.size();
    return n;
  }
};

struct MasterModel {
  mp::MathProgram program;
  std::vector<std::vector<int>> x;  // [k][t-1], -1 for existing lines
  std::vector<std::vector<int>> y;  // [i][t-1], -1 for non-candidates
  std::vector<int> gamma;           // [t-1]
};

struct MasterSolution {
  InvestmentPlan plan;
  StatusSchedule statuses;
  std::vector<double> gamma;  // M EUR, already divided by (1 + I)
  double lower_bound = 0.0;   // M EUR
  long nodes = 0;
};

inline MasterModel build_master(const NetworkCase& c, const ScenarioPool& pool) {
  require_valid(c);
  const Topology topo(c);
  const int ny = c.horizon();
  const auto& pc = c.planning;
  MasterModel m;
  m.program = mp::MathProgram("master");
  auto& p = m.program;
  auto ts = [](int t) { return std::to_string(t); };

  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    std::vector<int> row(static_cast<std::size_t>(ny), -1);
    if (c.lines[k].candidate()) {
      for (int t = 1; t <= ny; ++t) row[static_cast<std::size_t>(t - 1)] = p.add_binary("x_" + c.lines[k].id + "_" + ts(t)).index;
    }
    m.x.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(ny), -1);
    if (c.generators[i].candidate()) {
      for (int t = 1; t <= ny; ++t) row[static_cast<std::size_t>(t - 1)] = p.add_binary("y_" + c.generators[i].id + "_" + ts(t)).index;
    }
    m.y.push_back(std::move(row));
  }
  for (int t = 1; t <= ny; ++t) {
    const auto g = p.add_variable("gamma_" + ts(t), 0.0, mp::kInf);
    m.gamma.push_back(g.index);
    p.set_objective_coef(g, discount_factor(pc.discount_rate, t));
  }

  // Cumulative status terms sum_{p<=t} b^p, scaled by coef.
  auto status_terms = [&](const std::vector<int>& row, int t, double coef) {
    std::vector<mp::Term> terms;
    for (int q = 1; q <= t; ++q) terms.push_back({mp::VarId{row[static_cast<std::size_t>(q - 1)]}, coef});
    return terms;
  };

  std::vector<mp::Term> line_budget;
  std::vector<mp::Term> gen_budget;
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (!c.lines[k].candidate()) continue;
    p.add_constraint("once_" + c.lines[k].id, status_terms(m.x[k], ny, 1.0), mp::RowSense::le, 1.0);
    for (int t = 1; t <= ny; ++t) {
      const double cost = discount_factor(pc.discount_rate, t) * *c.lines[k].invest_cost;
      const mp::VarId v{m.x[k][static_cast<std::size_t>(t - 1)]};
      p.set_objective_coef(v, cost);
      line_budget.push_back({v, cost});
    }
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (!c.generators[i].candidate()) continue;
    p.add_constraint("once_" + c.generators[i].id, status_terms(m.y[i], ny, 1.0), mp::RowSense::le, 1.0);
    for (int t = 1; t <= ny; ++t) {
      const double cost = discount_factor(pc.discount_rate, t) * *c.generators[i].invest_cost;
      const mp::VarId v{m.y[i][static_cast<std::size_t>(t - 1)]};
      p.set_objective_coef(v, cost);
      gen_budget.push_back({v, cost});
    }
  }
  if (!line_budget.empty()) p.add_constraint("budget_lines", line_budget, mp::RowSense::le, pc.line_budget);
  if (!gen_budget.empty()) p.add_constraint("budget_gens", gen_budget, mp::RowSense::le, pc.gen_budget);

  for (const auto& grp : c.generator_groups) {
    for (std::size_t q = 1; q < grp.members.size(); ++q) {
      const auto a = static_cast<std::size_t>(c.generator_index(grp.members[q - 1]));
      const auto b = static_cast<std::size_t>(c.generator_index(grp.members[q]));
      for (int t = 1; t <= ny; ++t) {
        auto terms = status_terms(m.y[a], t, -1.0);
        terms.push_back({mp::VarId{m.y[b][static_cast<std::size_t>(t - 1)]}, 1.0});
        p.add_constraint("phase_" + grp.members[q] + "_" + ts(t), terms, mp::RowSense::le, 0.0);
        p.add_constraint("apart_" + grp.members[q] + "_" + ts(t),
                         {{mp::VarId{m.y[a][static_cast<std::size_t>(t - 1)]}, 1.0},
                          {mp::VarId{m.y[b][static_cast<std::size_t>(t - 1)]}, 1.0}},
                         mp::RowSense::le, 1.0);
      }
    }
  }

  // Step indicators q_{s,t} >= [new units active at t >= threshold_s].
  int n_cand = 0;
  for (const auto& g : c.generators) n_cand += g.candidate() ? 1 : 0;
  std::vector<double> delta;
  {
    int prev = 0;
    for (const auto& st : pc.gamma_g_steps) {
      delta.push_back(std::max(0, st.increment - prev));
      prev = std::max(prev, st.increment);
    }
  }
  std::vector<std::vector<int>> qvar(static_cast<std::size_t>(ny));
  auto step_indicators = [&](int t) -> const std::vector<int>& {
    auto& q = qvar[static_cast<std::size_t>(t - 1)];
    if (!q.empty() || pc.gamma_g_steps.empty()) return q;
    for (std::size_t s = 0; s < pc.gamma_g_steps.size(); ++s) {
      const auto v = p.add_binary("q" + std::to_string(s + 1) + "_" + ts(t));
      q.push_back(v.index);
      std::vector<mp::Term> terms{{v, -static_cast<double>(std::max(n_cand, 1))}};
      for (std::size_t i = 0; i < c.generators.size(); ++i) {
        if (!c.generators[i].candidate()) continue;
        auto st = status_terms(m.y[i], t, 1.0);
        terms.insert(terms.end(), st.begin(), st.end());
      }
      p.add_constraint("step" + std::to_string(s + 1) + "_" + ts(t), terms, mp::RowSense::le,
                       pc.gamma_g_steps[s].threshold - 1.0);
    }
    return q;
  };

  const double op_coef = pc.sigma_hours / (kEurosPerMillion * (1.0 + pc.discount_rate));
  for (int t = 1; t <= ny; ++t) {
    const auto& scen = pool.by_period.at(static_cast<std::size_t>(t - 1));
    for (std::size_t l = 0; l < scen.size(); ++l) {
      const auto& u = scen[l];
      const std::string tag = "_" + ts(t) + "_" + std::to_string(l + 1);
      std::vector<mp::Term> cut{{mp::VarId{m.gamma[static_cast<std::size_t>(t - 1)]}, 1.0}};
      double cost_cap = 0.0;

      std::vector<std::vector<mp::Term>> balance(c.buses.size());
      std::vector<int> th;
      for (std::size_t n = 0; n < c.buses.size(); ++n) {
        const bool slack = static_cast<int>(n) == topo.slack;
        th.push_back(p.add_variable("th_" + c.buses[n].id + tag, slack ? 0.0 : -kPi, slack ? 0.0 : kPi).index);
      }
      for (std::size_t i = 0; i < c.generators.size(); ++i) {
        const auto& g = c.generators[i];
        double cap = u.u_gen.at(i);
        if (g.category == GenCategory::dismantled && t > *g.dismantle_period) cap = 0.0;
        const auto gv = p.add_variable("g_" + g.id + tag, 0.0, cap);
        balance[static_cast<std::size_t>(topo.gen_bus[i])].push_back({gv, 1.0});
        cut.push_back({gv, -op_coef * g.op_cost});
        cost_cap += op_coef * g.op_cost * cap;
        if (g.candidate()) {
          auto terms = status_terms(m.y[i], t, -cap);
          terms.push_back({gv, 1.0});
          p.add_constraint("gcap_" + g.id + tag, terms, mp::RowSense::le, 0.0);
        }
      }
      std::vector<double> load(c.buses.size(), 0.0);
      for (std::size_t j = 0; j < c.demands.size(); ++j) {
        const auto& d = c.demands[j];
        const double ud = u.u_dem.at(j);
        const auto rv = p.add_variable("r_" + d.id + tag, 0.0, d.shed_limit(t) * ud);
        balance[static_cast<std::size_t>(topo.dem_bus[j])].push_back({rv, 1.0});
        load[static_cast<std::size_t>(topo.dem_bus[j])] += ud;
        cut.push_back({rv, -op_coef * d.shed_cost});
        cost_cap += op_coef * d.shed_cost * d.shed_limit(t) * ud;
      }
      for (std::size_t k = 0; k < c.lines.size(); ++k) {
        const auto& ln = c.lines[k];
        const auto o = static_cast<std::size_t>(topo.line_from[k]);
        const auto r = static_cast<std::size_t>(topo.line_to[k]);
        const auto f = p.add_variable("f_" + ln.id + tag, -ln.capacity_mw, ln.capacity_mw);
        balance[o].push_back({f, -1.0});
        balance[r].push_back({f, 1.0});
        std::vector<mp::Term> flow{{f, 1.0}, {mp::VarId{th[o]}, -ln.susceptance}, {mp::VarId{th[r]}, ln.susceptance}};
        if (!ln.candidate()) {
          p.add_constraint("flow_" + ln.id + tag, flow, mp::RowSense::eq, 0.0);
          continue;
        }
        const double big = 2.0 * kPi * ln.susceptance;
        auto hi = flow;
        auto st = status_terms(m.x[k], t, big);
        hi.insert(hi.end(), st.begin(), st.end());
        p.add_constraint("flowhi_" + ln.id + tag, hi, mp::RowSense::le, big);
        auto lo = flow;
        st = status_terms(m.x[k], t, -big);
        lo.insert(lo.end(), st.begin(), st.end());
        p.add_constraint("flowlo_" + ln.id + tag, lo, mp::RowSense::ge, -big);
        auto cap_hi = status_terms(m.x[k], t, -ln.capacity_mw);
        cap_hi.push_back({f, 1.0});
        p.add_constraint("fcaphi_" + ln.id + tag, cap_hi, mp::RowSense::le, 0.0);
        auto cap_lo = status_terms(m.x[k], t, ln.capacity_mw);
        cap_lo.push_back({f, 1.0});
        p.add_constraint("fcaplo_" + ln.id + tag, cap_lo, mp::RowSense::ge, 0.0);
      }
      for (std::size_t n = 0; n < c.buses.size(); ++n) {
        p.add_constraint("bal_" + c.buses[n].id + tag, balance[n], mp::RowSense::eq, load[n]);
      }

      // Activation of scenarios that may lie outside a smaller budget.
      int deviating = 0;
      for (int z : u.z_gen) deviating += z;
      if (deviating > pc.gamma_g_base && !pc.gamma_g_steps.empty()) {
        const auto& q = step_indicators(t);
        double sum_delta = 0.0;
        for (double dlt : delta) sum_delta += dlt;
        const double big = pc.gamma_g_base + 1.0 + sum_delta;
        const auto v = p.add_binary("v" + tag);
        std::vector<mp::Term> cnt{{v, -big}};
        double fixed_active = 0.0;
        for (std::size_t i = 0; i < c.generators.size(); ++i) {
          if (!u.z_gen[i]) continue;
          const auto& g = c.generators[i];
          if (g.candidate()) {
            auto st = status_terms(m.y[i], t, 1.0);
            cnt.insert(cnt.end(), st.begin(), st.end());
          } else if (g.category != GenCategory::dismantled || t <= *g.dismantle_period) {
            fixed_active += 1.0;
          }
        }
        for (std::size_t s = 0; s < q.size(); ++s) cnt.push_back({mp::VarId{q[s]}, -delta[s]});
        p.add_constraint("outside" + tag, cnt, mp::RowSense::ge, pc.gamma_g_base + 1.0 - big - fixed_active);
        cut.push_back({v, cost_cap});
      }
      p.add_constraint("cut" + tag, cut, mp::RowSense::ge, 0.0);
    }
  }
  return m;
}

inline MasterSolution solve_master(const MasterModel& m, const NetworkCase& c,
                                   const mp::SolverBackend& backend = mp::builtin_backend()) {
  const auto out = backend.solve_mip(m.program);
  if (out.status == mp::SolveStatus::infeasible) throw SolverError("master problem infeasible");
  if (!out.optimal()) throw SolverError(std::string("master problem: ") + mp::to_string(out.status));
  MasterSolution sol;
  sol.nodes = out.nodes;
  sol.plan = InvestmentPlan::empty(c);
  auto bit = [&](int v) { return static_cast<int>(std::lround(out.primal[static_cast<std::size_t>(v)])); };
  const int ny = c.horizon();
  for (std::size_t k = 0; k < m.x.size(); ++k) {
    for (int t = 1; t <= ny; ++t) {
      const int v = m.x[k][static_cast<std::size_t>(t - 1)];
      if (v >= 0) sol.plan.line_build[k][static_cast<std::size_t>(t - 1)] = bit(v);
    }
  }
  for (std::size_t i = 0; i < m.y.size(); ++i) {
    for (int t = 1; t <= ny; ++t) {
      const int v = m.y[i][static_cast<std::size_t>(t - 1)];
      if (v >= 0) sol.plan.gen_build[i][static_cast<std::size_t>(t - 1)] = bit(v);
    }
  }
  sol.statuses = expand_statuses(sol.plan, c);
  for (int t = 1; t <= ny; ++t) {
    const double g = out.primal[static_cast<std::size_t>(m.gamma[static_cast<std::size_t>(t - 1)])];
    sol.gamma.push_back(g);
    sol.lower_bound += discount_factor(c.planning.discount_rate, t) * (period_investment(sol.plan, c, t) + g);
  }
  if (const auto why = plan_violation(sol.plan, c); !why.empty()) {
    throw SolverError("master returned an inadmissible plan: " + why);
  }
  return sol;
}

inline MasterSolution solve_master(const NetworkCase& c, const ScenarioPool& pool,
                                   const mp::SolverBackend& backend = mp::builtin_backend()) {
  return solve_master(build_master(c, pool), c, backend);
}

}  // namespace gtep
