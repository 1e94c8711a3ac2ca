#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "gtep/mp/backend.hpp"
#include "lp_oracles.hpp"

using namespace gtep::mp;
namespace gt = gtep::testing;

TEST(SolveLp, SingleVariableLowerBoundRow) {
  MathProgram p;
  const auto x = p.add_variable("x", -kInf, kInf);
  p.set_objective_coef(x, 1.0);
  const auto r = p.add_constraint("c", {{x, 1.0}}, RowSense::ge, 3.0);
  const auto out = solve_lp(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value(x), 3.0, 1e-12);
  EXPECT_NEAR(out.objective, 3.0, 1e-12);
  EXPECT_NEAR(out.dual(r), 1.0, 1e-12);
}

TEST(SolveLp, MaximizeOnSimplex) {
  MathProgram p;
  const auto x = p.add_variable("x", 0, kInf);
  const auto y = p.add_variable("y", 0, kInf);
  p.set_objective_sense(ObjSense::maximize);
  p.set_objective_coef(x, 1.0);
  p.set_objective_coef(y, 1.0);
  const auto r = p.add_constraint("cap", {{x, 1.0}, {y, 1.0}}, RowSense::le, 1.0);
  const auto out = solve_lp(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
  EXPECT_NEAR(out.dual(r), 1.0, 1e-12);
}

TEST(SolveLp, DetectsInfeasibleAndNamesRow) {
  MathProgram p;
  const auto x = p.add_variable("x", 0, 1);
  p.add_constraint("too_big", {{x, 1.0}}, RowSense::ge, 2.0);
  const auto out = solve_lp(p);
  EXPECT_EQ(out.status, SolveStatus::infeasible);
  ASSERT_EQ(out.infeasible_rows.size(), 1u);
  EXPECT_EQ(out.infeasible_rows[0], "too_big");
}

TEST(SolveLp, DetectsUnbounded) {
  MathProgram p;
  const auto x = p.add_variable("x", 0, kInf);
  const auto y = p.add_variable("y", 0, kInf);
  p.set_objective_coef(x, -1.0);
  p.add_constraint("c", {{x, 1.0}, {y, -1.0}}, RowSense::le, 1.0);
  EXPECT_EQ(solve_lp(p).status, SolveStatus::unbounded);
}

TEST(SolveLp, NoRows) {
  MathProgram p;
  const auto x = p.add_variable("x", -2, 5);
  p.set_objective_coef(x, -1.0);
  const auto out = solve_lp(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_DOUBLE_EQ(out.value(x), 5.0);
}

TEST(SolveLp, RandomSixByTenMatchesVertexEnumeration) {
  std::mt19937 rng(6010);
  int checked = 0;
  for (int trial = 0; trial < 5; ++trial) {
    // 6 rows over 10 nonnegative variables; positive rows keep it bounded.
    MathProgram p("six_by_ten");
    std::vector<VarId> x;
    std::uniform_real_distribution<double> c(0.0, 4.0);
    for (int j = 0; j < 10; ++j) {
      x.push_back(p.add_variable("x" + std::to_string(j), 0.0, kInf));
      p.set_objective_coef(x.back(), std::round((c(rng) - 2.0) * 10) / 10);
    }
    for (int i = 0; i < 6; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < 10; ++j) t.push_back({x[static_cast<std::size_t>(j)], 0.5 + std::round(c(rng) * 10) / 10});
      p.add_constraint("r" + std::to_string(i), t, RowSense::le, 10.0 + i);
    }
    p.set_objective_sense(ObjSense::minimize);
    const auto oracle = gt::vertex_enumeration(p);
    const auto out = solve_lp(p);
    ASSERT_TRUE(oracle.feasible);
    ASSERT_TRUE(out.optimal());
    EXPECT_NEAR(out.objective, oracle.objective, 1e-7 * std::max(1.0, std::abs(oracle.objective)));
    ++checked;
  }
  EXPECT_EQ(checked, 5);
}

TEST(SolveLp, StrongDualityOnRandomPrograms) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = gt::random_lp(rng, 5, 4);
    const auto out = solve_lp(p);
    if (!out.optimal()) continue;
    // Dual objective: b'y plus bound terms weighted by reduced costs.
    double dual_obj = p.objective_constant();
    for (int i = 0; i < p.num_constraints(); ++i) dual_obj += p.constraints()[static_cast<std::size_t>(i)].rhs * out.duals[static_cast<std::size_t>(i)];
    for (int j = 0; j < p.num_variables(); ++j) {
      dual_obj += out.reduced_costs[static_cast<std::size_t>(j)] * out.primal[static_cast<std::size_t>(j)];
    }
    EXPECT_NEAR(dual_obj, out.objective, 1e-7 * std::max(1.0, std::abs(out.objective)));
    EXPECT_LE(p.max_violation(out.primal), 1e-9);
  }
}

TEST(SolveLp, RowScalingScalesDualInversely) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = gt::random_lp(rng, 4, 3);
    const auto base = solve_lp(p);
    if (!base.optimal()) continue;
    MathProgram scaled("scaled");
    for (const auto& v : p.variables()) scaled.add_variable(v.name, v.lower, v.upper, v.type);
    for (int j = 0; j < p.num_variables(); ++j) scaled.set_objective_coef(VarId{j}, p.objective()[static_cast<std::size_t>(j)]);
    scaled.set_objective_sense(p.objective_sense());
    const double k = 7.5;
    for (int i = 0; i < p.num_constraints(); ++i) {
      auto row = p.constraints()[static_cast<std::size_t>(i)];
      if (i == 0) {
        for (auto& t : row.terms) t.coef *= k;
        row.rhs *= k;
      }
      scaled.add_constraint(row.name, row.terms, row.sense, row.rhs);
    }
    const auto out = solve_lp(scaled);
    ASSERT_TRUE(out.optimal());
    EXPECT_NEAR(out.objective, base.objective, 1e-7 * std::max(1.0, std::abs(base.objective)));
    EXPECT_NEAR(out.duals[0] * k, base.duals[0], 1e-6 * std::max(1.0, std::abs(base.duals[0])));
  }
}

TEST(SolveLp, Deterministic) {
  std::mt19937 rng(99);
  const auto p = gt::random_lp(rng, 7, 5);
  const auto a = solve_lp(p);
  const auto b = solve_lp(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.duals, b.duals);
}

TEST(SolveLp, DegenerateCyclingProneProgramTerminates) {
  // Beale's classic cycling example for Dantzig pricing.
  MathProgram p;
  const auto x1 = p.add_variable("x1", 0, kInf);
  const auto x2 = p.add_variable("x2", 0, kInf);
  const auto x3 = p.add_variable("x3", 0, kInf);
  const auto x4 = p.add_variable("x4", 0, kInf);
  p.set_objective_coef(x1, -0.75);
  p.set_objective_coef(x2, 150.0);
  p.set_objective_coef(x3, -0.02);
  p.set_objective_coef(x4, 6.0);
  p.add_constraint("a", {{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, RowSense::le, 0.0);
  p.add_constraint("b", {{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, RowSense::le, 0.0);
  p.add_constraint("c", {{x3, 1.0}}, RowSense::le, 1.0);
  const auto out = solve_lp(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.objective, -0.05, 1e-9);
}

TEST(SolveMip, SingleBinaryMax) {
  MathProgram p;
  const auto x = p.add_binary("x");
  p.set_objective_sense(ObjSense::maximize);
  p.set_objective_coef(x, 1.0);
  const auto out = solve_mip(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_DOUBLE_EQ(out.objective, 1.0);
}

TEST(SolveMip, FiveItemKnapsackMatchesEnumeration) {
  MathProgram p("knapsack");
  const double value[] = {10, 13, 7, 8, 4};
  const double weight[] = {5, 7, 4, 5, 2};
  std::vector<Term> w;
  for (int i = 0; i < 5; ++i) {
    const auto x = p.add_binary("x" + std::to_string(i));
    p.set_objective_coef(x, value[i]);
    w.push_back({x, weight[i]});
  }
  p.add_constraint("cap", w, RowSense::le, 13.0);
  p.set_objective_sense(ObjSense::maximize);
  double best = 0.0;
  for (int mask = 0; mask < 32; ++mask) {
    double v = 0, wt = 0;
    for (int i = 0; i < 5; ++i) {
      if (mask >> i & 1) {
        v += value[i];
        wt += weight[i];
      }
    }
    if (wt <= 13.0) best = std::max(best, v);
  }
  const auto out = solve_mip(p);
  ASSERT_TRUE(out.optimal());
  EXPECT_DOUBLE_EQ(out.objective, best);
  EXPECT_DOUBLE_EQ(best, 24.0);
}

TEST(SolveMip, NoIntegersEqualsLp) {
  std::mt19937 rng(3);
  const auto p = gt::random_lp(rng, 5, 3);
  const auto a = solve_lp(p);
  const auto b = solve_mip(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(SolveMip, InfeasibleBinaryProgram) {
  MathProgram p;
  const auto x = p.add_binary("x");
  const auto y = p.add_binary("y");
  p.add_constraint("c", {{x, 2.0}, {y, 2.0}}, RowSense::eq, 1.0);
  EXPECT_EQ(solve_mip(p).status, SolveStatus::infeasible);
}

TEST(SolveMip, NodeLimitReportsIterationLimit) {
  std::mt19937 rng(11);
  const auto p = gt::random_mip(rng, 14, 0, 4);
  MipOptions opt;
  opt.max_nodes = 1;
  const auto out = solve_mip(p, opt);
  EXPECT_TRUE(out.status == SolveStatus::iteration_limit || out.status == SolveStatus::optimal);
}

TEST(SolveMip, RandomMixedProgramsMatchEnumeration) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = gt::random_mip(rng, 6, 2, 3);
    const auto oracle = gt::enumerate_mip(p, [](const MathProgram& q) { return gt::vertex_enumeration(q); });
    const auto out = solve_mip(p);
    ASSERT_EQ(oracle.feasible, out.optimal()) << "trial " << trial;
    if (oracle.feasible) {
      EXPECT_NEAR(out.objective, oracle.objective, 1e-7 * std::max(1.0, std::abs(oracle.objective)));
    }
  }
}

TEST(LpText, DumpListsRowsBoundsAndBinaries) {
  MathProgram p("demo");
  const auto x = p.add_binary("x");
  const auto y = p.add_variable("y", 0, kInf);
  p.set_objective_coef(x, 2.0);
  p.add_constraint("link", {{x, 1.0}, {y, -1.0}}, RowSense::ge, 0.0);
  std::ostringstream os;
  write_lp_text(os, p);
  const auto s = os.str();
  EXPECT_NE(s.find("Minimize"), std::string::npos);
  EXPECT_NE(s.find("link: + 1 x - 1 y >= 0"), std::string::npos);
  EXPECT_NE(s.find("0 <= y <= +inf"), std::string::npos);
  EXPECT_NE(s.find("Binaries\n x"), std::string::npos);
}

TEST(Backend, ResolvesBuiltinAndRejectsUnknown) {
  EXPECT_EQ(backend_by_name("").name(), "builtin");
  EXPECT_EQ(backend_by_name("builtin").name(), "builtin");
  EXPECT_THROW((void)backend_by_name("cplex"), std::invalid_argument);
}
