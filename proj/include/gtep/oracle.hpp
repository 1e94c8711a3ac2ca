#pragma once

// Brute-force references for desk-size instances: vertex enumeration of the
// uncertainty set and exhaustive search over build schedules.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtep/model.hpp"
#include "gtep/opf.hpp"
#include "gtep/subproblem.hpp"

namespace gtep {

struct EnumerationBudget {
  long max_vertices = 100000;
  long max_plans = 2000000;
};

class EnumerationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double binomial_sum(int n, int k) {
  double total = 0.0;
  double term = 1.0;
  for (int r = 0; r <= std::min(n, k); ++r) {
    total += term;
    term = term * (n - r) / (r + 1);
  }
  return total;
}

/// Every subset of {0..n-1} of size <= k, as 0/1 vectors in lexicographic order
/// of the chosen positions.
inline std::vector<std::vector<int>> bounded_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int start, int left) -> void {
    out.push_back(cur);
    if (left == 0) return;
    for (int i = start; i < n; ++i) {
      cur[static_cast<std::size_t>(i)] = 1;
      self(self, i + 1, left - 1);
      cur[static_cast<std::size_t>(i)] = 0;
    }
  };
  rec(rec, 0, k);
  return out;
}

}  // namespace detail

/// All binary deviation patterns allowed in period t, materialized.
inline std::vector<UncertaintyRealization> enumerate_vertices(const NetworkCase& c, const PeriodStatus& status, int t,
                                                              const EnumerationBudget& budget = {}) {
  std::vector<int> gens;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (status.gen.at(i)) gens.push_back(static_cast<int>(i));
  }
  const int nd = static_cast<int>(c.demands.size());
  const int gg = gamma_g_for(c, status);
  const int gd = c.planning.gamma_d;
  const double count = detail::binomial_sum(static_cast<int>(gens.size()), gg) * detail::binomial_sum(nd, gd);
  if (count > static_cast<double>(budget.max_vertices)) {
    throw EnumerationLimit("vertex enumeration needs about " + std::to_string(static_cast<long long>(count)) +
                           " points (cap " + std::to_string(budget.max_vertices) + ")");
  }
  std::vector<UncertaintyRealization> out;
  const auto gsets = detail::bounded_subsets(static_cast<int>(gens.size()), gg);
  const auto dsets = detail::bounded_subsets(nd, gd);
  for (const auto& gs : gsets) {
    std::vector<int> zg(c.generators.size(), 0);
    for (std::size_t a = 0; a < gens.size(); ++a) zg[static_cast<std::size_t>(gens[a])] = gs[a];
    for (const auto& ds : dsets) out.push_back(realize_uncertainty(c, status, zg, ds, t));
  }
  return out;
}

inline WorstCase oracle_worst_cost(const NetworkCase& c, const PeriodStatus& status, int t,
                                   const EnumerationBudget& budget = {},
                                   const mp::SolverBackend& backend = mp::builtin_backend()) {
  WorstCase best;
  bool have = false;
  for (const auto& u : enumerate_vertices(c, status, t, budget)) {
    const auto r = solve_opf(build_opf(c, status, u, t), backend);
    if (!have || r.cost > best.c_op) {
      best.realization = u;
      best.c_op = r.cost;
      best.mip_value = r.cost;
      best.dual = r.dual;
      have = true;
    }
  }
  return best;
}

/// Every admissible build schedule (budgets, build-once, phasing). Each
/// candidate asset picks a period in {never, 1..N_y}; schedules come out in
/// lexicographic order of that choice vector (lines first, then generators).
inline std::vector<InvestmentPlan> enumerate_plans(const NetworkCase& c, const EnumerationBudget& budget = {}) {
  struct Asset {
    bool line;
    std::size_t index;
  };
  std::vector<Asset> assets;
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (c.lines[k].candidate()) assets.push_back({true, k});
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (c.generators[i].candidate()) assets.push_back({false, i});
  }
  const int ny = c.horizon();
  const double total = std::pow(static_cast<double>(ny + 1), static_cast<double>(assets.size()));
  if (total > static_cast<double>(budget.max_plans)) {
    throw EnumerationLimit("plan enumeration needs " + std::to_string(static_cast<long long>(total)) +
                           " schedules (cap " + std::to_string(budget.max_plans) + ")");
  }
  std::vector<InvestmentPlan> out;
  std::vector<int> choice(assets.size(), 0);
  while (true) {
    auto plan = InvestmentPlan::empty(c);
    for (std::size_t a = 0; a < assets.size(); ++a) {
      if (choice[a] == 0) continue;
      if (assets[a].line) plan.build_line(assets[a].index, choice[a]);
      else plan.build_gen(assets[a].index, choice[a]);
    }
    if (plan_violation(plan, c).empty()) out.push_back(std::move(plan));
    bool done = true;
    for (std::size_t pos = assets.size(); pos-- > 0;) {
      if (choice[pos] < ny) {
        ++choice[pos];
        done = false;
        break;
      }
      choice[pos] = 0;
    }
    if (done) break;
  }
  return out;
}

struct OracleSolution {
  InvestmentPlan plan;
  double objective = 0.0;  // M EUR
  long plans_evaluated = 0;
};

/// Exhaustive minimum over every admissible build schedule of investment plus
/// discounted worst-case operation; ties keep the first schedule in
/// enumerate_plans order.
inline OracleSolution oracle_global_solve(const NetworkCase& c, const EnumerationBudget& budget = {},
                                          const mp::SolverBackend& backend = mp::builtin_backend()) {
  require_valid(c);
  std::map<std::pair<int, PeriodStatus>, double> worst_cache;
  auto worst = [&](int t, const PeriodStatus& st) {
    const auto key = std::make_pair(t, st);
    if (auto it = worst_cache.find(key); it != worst_cache.end()) return it->second;
    const double v = oracle_worst_cost(c, st, t, budget, backend).c_op;
    worst_cache.emplace(key, v);
    return v;
  };
  OracleSolution best;
  bool have = false;
  for (auto& plan : enumerate_plans(c, budget)) {
    ++best.plans_evaluated;
    const auto sched = expand_statuses(plan, c);
    double obj = investment_npc(plan, c).total();
    for (int t = 1; t <= c.horizon(); ++t) obj += discounted_operation(c.planning, t, worst(t, sched.at(t)));
    if (!have || obj < best.objective - 1e-9 * std::max(1.0, std::abs(best.objective))) {
      best.plan = std::move(plan);
      best.objective = obj;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("no admissible build schedule");
  return best;
}

}  // namespace gtep
