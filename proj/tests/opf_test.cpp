#include <gtest/gtest.h>

#include <random>

#include "gtep/opf.hpp"
#include "test_cases.hpp"

using namespace gtep;
using gtep::testing::make_line;

namespace {

OpfResult solve_at(const NetworkCase& c, const std::vector<int>& zg, const std::vector<int>& zd, int t = 1,
                   const InvestmentPlan* plan = nullptr) {
  const auto p = plan ? *plan : InvestmentPlan::empty(c);
  const auto st = expand_statuses(p, c).at(t);
  const auto u = realize_uncertainty(c, st, zg, zd, t);
  return solve_opf(build_opf(c, st, u, t));
}

OpfResult solve_nominal(const NetworkCase& c, int t = 1, const InvestmentPlan* plan = nullptr) {
  return solve_at(c, std::vector<int>(c.generators.size(), 0), std::vector<int>(c.demands.size(), 0), t, plan);
}

// Reduced-cost conditions of the operational LP written out per column.
void expect_dual_feasible(const NetworkCase& c, const PeriodStatus& st, const OpfResult& r) {
  const Topology topo(c);
  const double sigma = c.planning.sigma_hours;
  const auto& d = r.dual;
  const double tol = 1e-6 * sigma * 1000.0;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto n = static_cast<std::size_t>(topo.gen_bus[i]);
    EXPECT_GE(sigma * c.generators[i].op_cost - d.lambda[n] - d.varphi_g[i], -tol);
    EXPECT_LE(d.varphi_g[i], tol);
  }
  for (std::size_t j = 0; j < c.demands.size(); ++j) {
    const auto n = static_cast<std::size_t>(topo.dem_bus[j]);
    EXPECT_GE(sigma * c.demands[j].shed_cost - d.lambda[n] - d.varphi_d[j], -tol);
    EXPECT_GE(d.lambda[n] - d.alpha_d[j], -tol);
    EXPECT_LE(d.varphi_d[j], tol);
  }
  std::vector<double> theta_col(c.buses.size(), 0.0);
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (!st.line[k]) continue;
    const auto o = static_cast<std::size_t>(topo.line_from[k]);
    const auto rr = static_cast<std::size_t>(topo.line_to[k]);
    EXPECT_NEAR(d.lambda[o] - d.lambda[rr] - d.phi[k] - d.phi_hat[k] - d.phi_check[k], 0.0, tol);
    EXPECT_LE(d.phi_hat[k], tol);
    EXPECT_GE(d.phi_check[k], -tol);
    theta_col[o] += -c.lines[k].susceptance * d.phi[k];
    theta_col[rr] += c.lines[k].susceptance * d.phi[k];
  }
  for (std::size_t n = 0; n < c.buses.size(); ++n) {
    double s = theta_col[n] + d.xi_hat[n] + d.xi_check[n];
    if (static_cast<int>(n) == topo.slack) s += d.chi;
    EXPECT_NEAR(s, 0.0, tol);
    EXPECT_LE(d.xi_hat[n], tol);
    EXPECT_GE(d.xi_check[n], -tol);
  }
}

}  // namespace

TEST(Opf, OneBusDispatch) {
  const auto c = gtep::testing::one_bus_case();
  const auto r = solve_nominal(c);
  EXPECT_NEAR(r.dispatch.gen_mw[0], 80.0, 1e-9);
  EXPECT_NEAR(r.dispatch.shed_mw[0], 0.0, 1e-9);
  EXPECT_NEAR(r.cost, 8760.0 * 10.0 * 80.0, 1e-6);
  EXPECT_NEAR(r.dual.lambda[0], 8760.0 * 10.0, 1e-6);
}

TEST(Opf, ForcedSheddingWhenCapacityDeviates) {
  auto c = gtep::testing::one_bus_case(100.0);
  c.planning.gamma_g_base = 1;
  const auto r = solve_at(c, {1}, {0});
  EXPECT_NEAR(r.dispatch.shed_mw[0], 80.0, 1e-9);
  EXPECT_NEAR(r.cost, 8760.0 * 1000.0 * 80.0, 1e-3);
}

TEST(Opf, TwoBusFlowLimitBinds) {
  const auto c = gtep::testing::two_bus_case();
  const auto r = solve_nominal(c);
  EXPECT_NEAR(r.dispatch.flow_mw[0], 50.0, 1e-9);
  EXPECT_NEAR(r.dispatch.shed_mw[0], 30.0, 1e-9);
  EXPECT_NEAR(r.cost, 8760.0 * (10.0 * 50.0 + 1000.0 * 30.0), 1e-3);
  EXPECT_LT(r.dual.phi_hat[0], 0.0);
  expect_dual_feasible(c, expand_statuses(InvestmentPlan::empty(c), c).at(1), r);
}

TEST(Opf, ZeroDemandCostsNothing) {
  auto c = gtep::testing::two_bus_case();
  c.demands[0].load_nominal_mw = 0.0;
  const auto r = solve_nominal(c);
  EXPECT_NEAR(r.cost, 0.0, 1e-9);
  EXPECT_NEAR(r.dispatch.gen_mw[0], 0.0, 1e-9);
}

TEST(Opf, DeterministicRepeatSolve) {
  const auto c = gtep::testing::two_bus_case();
  const auto a = solve_nominal(c);
  const auto b = solve_nominal(c);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.dispatch.flow_mw, b.dispatch.flow_mw);
  EXPECT_EQ(a.dual.lambda, b.dual.lambda);
}

TEST(Opf, UnbuiltCandidateLineCarriesNoFlow) {
  auto c = gtep::testing::two_bus_case();
  c.lines.push_back(make_line("c1", "b1", "b2", 500.0, 50.0, 10.0));
  const auto r0 = solve_nominal(c);
  EXPECT_EQ(r0.dispatch.flow_mw[1], 0.0);
  auto plan = InvestmentPlan::empty(c);
  plan.build_line(1, 1);
  const auto r1 = solve_nominal(c, 1, &plan);
  EXPECT_NEAR(r1.dispatch.shed_mw[0], 0.0, 1e-9);
  EXPECT_NEAR(r1.dispatch.flow_mw[0] + r1.dispatch.flow_mw[1], 80.0, 1e-9);
}

TEST(Opf, InfeasibleShedCapNamesRows) {
  auto c = gtep::testing::one_bus_case(100.0);
  c.planning.gamma_g_base = 1;
  c.demands[0].shed_fraction = {0.5};
  EXPECT_THROW(solve_at(c, {1}, {0}), SolverError);
}

TEST(Opf, RandomCasesBalanceFlowDualityAndMonotoneCapacity) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    gtep::testing::RandomCaseShape shape;
    shape.buses = 3 + trial % 2;
    auto c = gtep::testing::random_case(rng, shape);
    auto plan = InvestmentPlan::empty(c);
    for (std::size_t k = 0; k < c.lines.size(); ++k) {
      if (c.lines[k].candidate() && trial % 3 != 0) plan.build_line(k, 1);
    }
    const auto st = expand_statuses(plan, c).at(1);
    const auto u = nominal_realization(c, st, 1);
    const auto m = build_opf(c, st, u, 1);
    const auto r = solve_opf(m);
    const Topology topo(c);
    std::vector<double> net(c.buses.size(), 0.0);
    for (std::size_t i = 0; i < c.generators.size(); ++i) net[static_cast<std::size_t>(topo.gen_bus[i])] += r.dispatch.gen_mw[i];
    for (std::size_t j = 0; j < c.demands.size(); ++j) {
      net[static_cast<std::size_t>(topo.dem_bus[j])] += r.dispatch.shed_mw[j] - r.dispatch.demand_mw[j];
    }
    for (std::size_t k = 0; k < c.lines.size(); ++k) {
      const double f = r.dispatch.flow_mw[k];
      net[static_cast<std::size_t>(topo.line_from[k])] -= f;
      net[static_cast<std::size_t>(topo.line_to[k])] += f;
      if (st.line[k]) {
        const double expect = c.lines[k].susceptance *
                              (r.dispatch.angle_rad[static_cast<std::size_t>(topo.line_from[k])] -
                               r.dispatch.angle_rad[static_cast<std::size_t>(topo.line_to[k])]);
        EXPECT_NEAR(f, expect, 1e-7);
        EXPECT_LE(std::abs(f), c.lines[k].capacity_mw + 1e-7);
      } else {
        EXPECT_EQ(f, 0.0);
      }
    }
    for (double v : net) EXPECT_NEAR(v, 0.0, 1e-7);
    EXPECT_NEAR(r.dual_cost, r.cost, 1e-7 * std::max(1.0, r.cost));
    expect_dual_feasible(c, st, r);

    auto bigger = c;
    bigger.lines[static_cast<std::size_t>(trial) % bigger.lines.size()].capacity_mw *= 1.5;
    const auto st2 = expand_statuses(plan, bigger).at(1);
    const double cost2 = solve_opf(build_opf(bigger, st2, nominal_realization(bigger, st2, 1), 1)).cost;
    EXPECT_LE(cost2, r.cost + 1e-7 * std::max(1.0, r.cost));
  }
}

TEST(EvaluatePlan, InvestmentDiscounting) {
  auto c = gtep::testing::two_bus_case();
  c.demands[0].load_nominal_mw = 0.0;
  c.lines.push_back(make_line("c1", "b1", "b2", 500.0, 50.0, 10.0));
  c.planning = gtep::testing::make_planning(2);
  c.planning.discount_rate = 0.0;
  c.demands[0] = gtep::testing::make_demand("d1", "b2", 0.0, 0.0, 1000.0, 2);

  auto empty = InvestmentPlan::empty(c);
  const auto s0 = expand_statuses(empty, c);
  EXPECT_NEAR(evaluate_plan(c, empty, nominal_realizations(c, s0)).total, 0.0, 1e-12);

  auto at1 = InvestmentPlan::empty(c);
  at1.build_line(1, 1);
  EXPECT_NEAR(evaluate_plan(c, at1, nominal_realizations(c, expand_statuses(at1, c))).investment.line_npc, 10.0, 1e-12);

  c.planning.discount_rate = 0.1;
  auto at2 = InvestmentPlan::empty(c);
  at2.build_line(1, 2);
  const auto ev = evaluate_plan(c, at2, nominal_realizations(c, expand_statuses(at2, c)));
  EXPECT_NEAR(ev.investment.line_npc, 10.0 / 1.1, 1e-12);
  EXPECT_NEAR(ev.total, 10.0 / 1.1, 1e-12);

  c.planning.line_budget = 5.0;
  EXPECT_THROW(evaluate_plan(c, at2, nominal_realizations(c, expand_statuses(at2, c))), std::invalid_argument);
}

TEST(EvaluatePlan, OperatingCostConvertedOnceToMillions) {
  auto c = gtep::testing::one_bus_case();
  c.planning.discount_rate = 0.1;
  const auto s = expand_statuses(InvestmentPlan::empty(c), c);
  const auto ev = evaluate_plan(c, InvestmentPlan::empty(c), nominal_realizations(c, s));
  EXPECT_NEAR(ev.total, 8760.0 * 10.0 * 80.0 / 1e6 / 1.1, 1e-12);
  EXPECT_NEAR(ev.periods[0].c_op, 7008000.0, 1e-6);
}
