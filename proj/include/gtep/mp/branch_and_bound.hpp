#pragma once

// LP-based branch-and-bound for programs with binary variables.
//
// Node selection is best-bound, except that the search dives depth-first
// (preferring the child on the side the fractional value leans toward) until
// the first incumbent is found. Branching picks the most fractional binary;
// ties go to the lowest variable index. Every node LP is re-optimized from its
// parent's basis with the dual simplex.

#include <cmath>
#include <queue>
#include <vector>

#include "gtep/mp/program.hpp"
#include "gtep/mp/simplex.hpp"

namespace gtep::mp {

struct MipOptions {
  double abs_gap = 1e-9;
  double rel_gap = 1e-9;
  double int_tol = 1e-6;
  long max_nodes = 500000;
  LpOptions lp{};
};

namespace detail {

struct BbNode {
  std::vector<double> lo;
  std::vector<double> up;
  double bound = 0.0;
  long id = 0;
  SimplexEngine::Basis basis;
};

struct BbNodeOrder {
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace detail

inline SolveOutcome solve_mip(const MathProgram& program, const MipOptions& options = {}) {
  if (!program.has_integers()) return solve_lp(program, options.lp);

  std::vector<int> ints;
  for (int j = 0; j < program.num_variables(); ++j) {
    if (program.variables()[static_cast<std::size_t>(j)].type == VarType::binary) ints.push_back(j);
  }
  const double sign = program.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
  SimplexEngine engine(program, options.lp);

  SolveOutcome result;
  result.status = SolveStatus::infeasible;
  double incumbent = kInf;  // in minimization sense
  std::vector<double> best_x;
  long lp_iters = 0;
  long nodes = 0;
  long next_id = 0;

  auto gap_of = [&](double inc) { return std::max(options.abs_gap, options.rel_gap * std::abs(inc)); };
  auto apply_bounds = [&](const std::vector<double>& lo, const std::vector<double>& up) {
    for (std::size_t k = 0; k < ints.size(); ++k) engine.set_bounds(ints[k], lo[k], up[k]);
  };

  std::vector<double> root_lo;
  std::vector<double> root_up;
  for (int j : ints) {
    root_lo.push_back(program.variables()[static_cast<std::size_t>(j)].lower);
    root_up.push_back(program.variables()[static_cast<std::size_t>(j)].upper);
  }

  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  detail::BbNode current{root_lo, root_up, -kInf, next_id++, {}};
  bool have_current = true;
  bool root = true;
  bool unbounded = false;

  while (true) {
    if (!have_current) {
      if (open.empty()) break;
      current = open.top();
      open.pop();
      if (current.bound >= incumbent - gap_of(incumbent)) break;
      apply_bounds(current.lo, current.up);
      engine.set_basis(current.basis);
    } else if (!root) {
      apply_bounds(current.lo, current.up);
    }
    have_current = false;
    if (nodes >= options.max_nodes) {
      result.status = SolveStatus::iteration_limit;
      break;
    }
    ++nodes;
    const SolveOutcome lp = root ? engine.solve_cold() : engine.solve();
    root = false;
    lp_iters += lp.iterations;
    if (lp.status == SolveStatus::unbounded) {
      unbounded = true;
      break;
    }
    if (lp.status == SolveStatus::iteration_limit) {
      result.status = SolveStatus::iteration_limit;
      break;
    }
    if (lp.status != SolveStatus::optimal) continue;
    const double value = sign * lp.objective;
    if (value >= incumbent - gap_of(incumbent)) continue;

    int branch = -1;
    double best_frac = 0.0;
    for (std::size_t k = 0; k < ints.size(); ++k) {
      const double v = lp.primal[static_cast<std::size_t>(ints[k])];
      const double f = v - std::floor(v);
      const double dist = std::min(f, 1.0 - f);
      if (dist > options.int_tol && dist > best_frac + 1e-12) {
        best_frac = dist;
        branch = static_cast<int>(k);
      }
    }

    if (branch < 0) {
      // Integral: re-solve with binaries pinned for a clean incumbent.
      std::vector<double> fix(ints.size());
      for (std::size_t k = 0; k < ints.size(); ++k) {
        fix[k] = std::round(lp.primal[static_cast<std::size_t>(ints[k])]);
      }
      apply_bounds(fix, fix);
      SolveOutcome polished = engine.solve();
      lp_iters += polished.iterations;
      const SolveOutcome& use = polished.optimal() ? polished : lp;
      const double pv = sign * use.objective;
      if (pv < incumbent) {
        incumbent = pv;
        best_x = use.primal;
        for (std::size_t k = 0; k < ints.size(); ++k) best_x[static_cast<std::size_t>(ints[k])] = fix[k];
      }
      continue;
    }

    const double v = lp.primal[static_cast<std::size_t>(ints[static_cast<std::size_t>(branch)])];
    detail::BbNode down{current.lo, current.up, value, next_id++, engine.basis()};
    down.up[static_cast<std::size_t>(branch)] = std::floor(v);
    detail::BbNode up{current.lo, current.up, value, next_id++, down.basis};
    up.lo[static_cast<std::size_t>(branch)] = std::ceil(v);

    if (incumbent == kInf) {
      const bool up_first = v - std::floor(v) >= 0.5;
      current = up_first ? std::move(up) : std::move(down);
      open.push(up_first ? std::move(down) : std::move(up));
      have_current = true;
    } else {
      open.push(std::move(down));
      open.push(std::move(up));
    }
  }

  result.iterations = lp_iters;
  result.nodes = nodes;
  if (unbounded) {
    result.status = SolveStatus::unbounded;
    return result;
  }
  if (incumbent < kInf) {
    if (result.status != SolveStatus::iteration_limit) result.status = SolveStatus::optimal;
    result.primal = std::move(best_x);
    result.objective = sign * incumbent;
    double best_open = incumbent;
    if (!open.empty()) best_open = std::min(best_open, open.top().bound);
    result.bound = sign * best_open;
  } else if (result.status != SolveStatus::iteration_limit) {
    result.status = SolveStatus::infeasible;
  }
  return result;
}

}  // namespace gtep::mp
