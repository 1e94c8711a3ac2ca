#pragma once

// Dense bounded-variable revised simplex.
//
// Rows are brought to A x + s = b with one logical (slack) column per row whose
// bounds encode the row sense, plus one artificial column per row used only by
// phase one. The basis inverse is kept explicitly and updated by elementary
// row operations; it is rebuilt from scratch every `refactor_interval` pivots.
// After a successful solve the engine keeps its basis, so a later call after
// bound changes re-optimizes with the dual simplex (branch-and-bound relies on
// this).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "gtep/mp/program.hpp"

namespace gtep::mp {

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 50;
  int refactor_interval = 100;
  /// 0 selects a size-dependent limit.
  long max_iterations = 0;
};

class SimplexEngine {
 public:
  enum class State : std::int8_t { basic, at_lower, at_upper, free_zero };

  struct Basis {
    std::vector<int> head;
    std::vector<State> state;
  };

  explicit SimplexEngine(const MathProgram& program, LpOptions options = {})
      : opt_(options) {
    load(program);
  }

  [[nodiscard]] int num_structural() const { return n_; }
  [[nodiscard]] double lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  [[nodiscard]] double upper(int j) const { return up_[static_cast<std::size_t>(j)]; }

  /// Changes the bounds of a structural column; the current basis is kept.
  void set_bounds(int j, double lo, double up) {
    const auto uj = static_cast<std::size_t>(j);
    lo_[uj] = lo;
    up_[uj] = up;
    if (state_[uj] != State::basic) place_nonbasic(j);
  }

  [[nodiscard]] bool has_warm_basis() const { return warm_; }
  [[nodiscard]] Basis basis() const { return {head_, state_}; }

  /// Installs a basis captured earlier from this engine (same program).
  void set_basis(const Basis& b) {
    head_ = b.head;
    state_ = b.state;
    for (int j = 0; j < ncols_; ++j) {
      if (state_[static_cast<std::size_t>(j)] != State::basic) place_nonbasic(j);
    }
    warm_ = refactor();
    if (warm_) compute_basic_values();
  }

  /// Solves from the current basis when one is available, otherwise cold.
  SolveOutcome solve() {
    if (warm_) {
      long iters = 0;
      const Outcome r = reoptimize(iters);
      if (r != Outcome::numerical) return finish(r, iters);
    }
    return solve_cold();
  }

  SolveOutcome solve_cold() {
    long iters = 0;
    warm_ = false;
    crash();
    std::vector<double> phase1(static_cast<std::size_t>(ncols_), 0.0);
    for (int i = 0; i < m_; ++i) phase1[static_cast<std::size_t>(art(i))] = 1.0;
    Outcome r = primal_loop(phase1, iters);
    if (r == Outcome::iteration_limit || r == Outcome::numerical) {
      return finish(Outcome::iteration_limit, iters);
    }
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) infeas += x_[static_cast<std::size_t>(art(i))];
    if (infeas > infeasibility_tolerance()) return finish(Outcome::infeasible, iters);
    for (int i = 0; i < m_; ++i) {
      const auto a = static_cast<std::size_t>(art(i));
      lo_[a] = 0.0;
      up_[a] = 0.0;
      if (state_[a] != State::basic) state_[a] = State::at_lower;
    }
    for (int i = 0; i < m_; ++i) {
      const auto a = static_cast<std::size_t>(art(i));
      if (state_[a] != State::basic) x_[a] = 0.0;
    }
    compute_basic_values();
    r = primal_loop(cost_, iters);
    if (r == Outcome::numerical) r = Outcome::iteration_limit;
    return finish(r, iters);
  }

 private:
  enum class Outcome { optimal, infeasible, unbounded, iteration_limit, numerical };

  using Column = std::vector<std::pair<int, double>>;

  [[nodiscard]] int slack(int i) const { return n_ + i; }
  [[nodiscard]] int art(int i) const { return n_ + m_ + i; }

  void load(const MathProgram& p) {
    n_ = p.num_variables();
    m_ = p.num_constraints();
    ncols_ = n_ + 2 * m_;
    const auto nc = static_cast<std::size_t>(ncols_);
    col_.assign(nc, {});
    lo_.assign(nc, 0.0);
    up_.assign(nc, 0.0);
    cost_.assign(nc, 0.0);
    x_.assign(nc, 0.0);
    state_.assign(nc, State::at_lower);
    b_.assign(static_cast<std::size_t>(m_), 0.0);
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    art_sign_.assign(static_cast<std::size_t>(m_), 1.0);
    row_names_.clear();

    for (int j = 0; j < n_; ++j) {
      const auto& v = p.variables()[static_cast<std::size_t>(j)];
      lo_[static_cast<std::size_t>(j)] = v.lower;
      up_[static_cast<std::size_t>(j)] = v.upper;
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = p.constraints()[static_cast<std::size_t>(i)];
      row_names_.push_back(row.name);
      double amax = 0.0;
      for (const auto& t : row.terms) amax = std::max(amax, std::abs(t.coef));
      const double s = amax > 0.0 ? 1.0 / amax : 1.0;
      row_scale_[static_cast<std::size_t>(i)] = s;
      b_[static_cast<std::size_t>(i)] = row.rhs * s;
      for (const auto& t : row.terms) {
        if (t.coef != 0.0) col_[static_cast<std::size_t>(t.var.index)].emplace_back(i, t.coef * s);
      }
      const auto sl = static_cast<std::size_t>(slack(i));
      col_[sl].emplace_back(i, 1.0);
      switch (row.sense) {
        case RowSense::le: lo_[sl] = 0.0; up_[sl] = kInf; break;
        case RowSense::ge: lo_[sl] = -kInf; up_[sl] = 0.0; break;
        case RowSense::eq: lo_[sl] = 0.0; up_[sl] = 0.0; break;
      }
    }
    // Duplicate (row, var) entries are merged so columns stay canonical.
    for (auto& c : col_) {
      std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      Column merged;
      for (const auto& e : c) {
        if (!merged.empty() && merged.back().first == e.first) {
          merged.back().second += e.second;
        } else {
          merged.push_back(e);
        }
      }
      std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
      c = std::move(merged);
    }

    obj_sign_ = p.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
    obj_constant_ = p.objective_constant();
    double cmax = 0.0;
    for (double c : p.objective()) cmax = std::max(cmax, std::abs(c));
    cost_scale_ = cmax > 0.0 ? cmax : 1.0;
    for (int j = 0; j < n_; ++j) {
      cost_[static_cast<std::size_t>(j)] = obj_sign_ * p.objective()[static_cast<std::size_t>(j)] / cost_scale_;
    }
    bmax_ = 1.0;
    for (double v : b_) bmax_ = std::max(bmax_, std::abs(v));
    if (opt_.max_iterations <= 0) opt_.max_iterations = 20000 + 200L * (n_ + m_);
  }

  [[nodiscard]] double infeasibility_tolerance() const {
    return 1e-8 * bmax_ * std::max(1, m_ / 10);
  }

  void place_nonbasic(int j) {
    const auto uj = static_cast<std::size_t>(j);
    const bool lf = std::isfinite(lo_[uj]);
    const bool uf = std::isfinite(up_[uj]);
    State s = state_[uj];
    if (s == State::at_lower && !lf) s = uf ? State::at_upper : State::free_zero;
    if (s == State::at_upper && !uf) s = lf ? State::at_lower : State::free_zero;
    if (s == State::free_zero && (lf || uf)) s = lf ? State::at_lower : State::at_upper;
    state_[uj] = s;
    x_[uj] = s == State::at_lower ? lo_[uj] : s == State::at_upper ? up_[uj] : 0.0;
  }

  // Initial basis: slack where it absorbs the residual, artificial otherwise.
  void crash() {
    for (int j = 0; j < n_; ++j) {
      state_[static_cast<std::size_t>(j)] = State::at_lower;
      place_nonbasic(j);
    }
    std::vector<double> resid(b_);
    for (int j = 0; j < n_; ++j) {
      const double xj = x_[static_cast<std::size_t>(j)];
      if (xj == 0.0) continue;
      for (const auto& [i, a] : col_[static_cast<std::size_t>(j)]) resid[static_cast<std::size_t>(i)] -= a * xj;
    }
    head_.assign(static_cast<std::size_t>(m_), -1);
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto sl = static_cast<std::size_t>(slack(i));
      const auto ar = static_cast<std::size_t>(art(i));
      const double r = resid[ui];
      const bool slack_ok = r >= lo_[sl] && r <= up_[sl];
      if (slack_ok) {
        head_[ui] = slack(i);
        state_[sl] = State::basic;
        x_[sl] = r;
        art_sign_[ui] = 1.0;
        col_[ar] = {{i, 1.0}};
        lo_[ar] = 0.0;
        up_[ar] = 0.0;
        state_[ar] = State::at_lower;
        x_[ar] = 0.0;
        binv_[ui * static_cast<std::size_t>(m_) + ui] = 1.0;
      } else {
        state_[sl] = State::at_lower;
        place_nonbasic(slack(i));
        const double rr = r - x_[sl];
        const double sgn = rr >= 0.0 ? 1.0 : -1.0;
        art_sign_[ui] = sgn;
        col_[ar] = {{i, sgn}};
        lo_[ar] = 0.0;
        up_[ar] = kInf;
        head_[ui] = art(i);
        state_[ar] = State::basic;
        x_[ar] = std::abs(rr);
        binv_[ui * static_cast<std::size_t>(m_) + ui] = sgn;
      }
    }
    since_refactor_ = 0;
  }

  // Rebuilds the explicit inverse by Gauss-Jordan elimination with partial
  // pivoting. Dependent basic columns are swapped for artificials of uncovered
  // rows (artificials are fixed at zero outside phase one).
  bool refactor() {
    const auto m = static_cast<std::size_t>(m_);
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::vector<double> bmat(m * m, 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        for (const auto& [i, a] : col_[static_cast<std::size_t>(head_[k])]) {
          bmat[static_cast<std::size_t>(i) * m + k] = a;
        }
      }
      binv_.assign(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
      std::vector<int> pivot_row_of_col(m, -1);
      std::vector<char> row_used(m, 0);
      std::vector<std::size_t> bad_cols;
      // Work on [B | I]; eliminate column by column.
      for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = m;
        double best = 1e-11;
        for (std::size_t i = 0; i < m; ++i) {
          if (row_used[i]) continue;
          const double v = std::abs(bmat[i * m + k]);
          if (v > best) {
            best = v;
            piv = i;
          }
        }
        if (piv == m) {
          bad_cols.push_back(k);
          continue;
        }
        row_used[piv] = 1;
        pivot_row_of_col[k] = static_cast<int>(piv);
        const double inv = 1.0 / bmat[piv * m + k];
        for (std::size_t c = 0; c < m; ++c) {
          bmat[piv * m + c] *= inv;
          binv_[piv * m + c] *= inv;
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (i == piv) continue;
          const double f = bmat[i * m + k];
          if (f == 0.0) continue;
          for (std::size_t c = 0; c < m; ++c) {
            bmat[i * m + c] -= f * bmat[piv * m + c];
            binv_[i * m + c] -= f * binv_[piv * m + c];
          }
        }
      }
      if (bad_cols.empty()) {
        // Rows of binv_ are indexed by pivot row; reorder to basis positions.
        std::vector<double> ordered(m * m);
        for (std::size_t k = 0; k < m; ++k) {
          const auto r = static_cast<std::size_t>(pivot_row_of_col[k]);
          std::copy_n(binv_.begin() + static_cast<std::ptrdiff_t>(r * m), m,
                      ordered.begin() + static_cast<std::ptrdiff_t>(k * m));
        }
        binv_ = std::move(ordered);
        since_refactor_ = 0;
        return true;
      }
      std::size_t next_free = 0;
      for (std::size_t k : bad_cols) {
        while (next_free < m && row_used[next_free]) ++next_free;
        if (next_free >= m) return false;
        const int j = head_[k];
        state_[static_cast<std::size_t>(j)] = State::at_lower;
        place_nonbasic(j);
        const int a = art(static_cast<int>(next_free));
        head_[k] = a;
        state_[static_cast<std::size_t>(a)] = State::basic;
        row_used[next_free] = 1;
      }
    }
    return false;
  }

  void compute_basic_values() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> rhs(b_);
    for (int j = 0; j < ncols_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (state_[uj] == State::basic) continue;
      const double xj = x_[uj];
      if (xj == 0.0) continue;
      for (const auto& [i, a] : col_[uj]) rhs[static_cast<std::size_t>(i)] -= a * xj;
    }
    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      const double* row = &binv_[k * m];
      for (std::size_t i = 0; i < m; ++i) s += row[i] * rhs[i];
      x_[static_cast<std::size_t>(head_[k])] = s;
    }
  }

  void compute_duals(const std::vector<double>& c, std::vector<double>& y) const {
    const auto m = static_cast<std::size_t>(m_);
    y.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double cb = c[static_cast<std::size_t>(head_[k])];
      if (cb == 0.0) continue;
      const double* row = &binv_[k * m];
      for (std::size_t i = 0; i < m; ++i) y[i] += cb * row[i];
    }
  }

  [[nodiscard]] double reduced_cost(int j, const std::vector<double>& c, const std::vector<double>& y) const {
    double d = c[static_cast<std::size_t>(j)];
    for (const auto& [i, a] : col_[static_cast<std::size_t>(j)]) d -= y[static_cast<std::size_t>(i)] * a;
    return d;
  }

  void ftran(int j, std::vector<double>& w) const {
    const auto m = static_cast<std::size_t>(m_);
    w.assign(m, 0.0);
    for (const auto& [i, a] : col_[static_cast<std::size_t>(j)]) {
      const auto ui = static_cast<std::size_t>(i);
      for (std::size_t k = 0; k < m; ++k) w[k] += binv_[k * m + ui] * a;
    }
  }

  void pivot(int r, const std::vector<double>& w) {
    const auto m = static_cast<std::size_t>(m_);
    const auto ur = static_cast<std::size_t>(r);
    double* prow = &binv_[ur * m];
    const double inv = 1.0 / w[ur];
    for (std::size_t c = 0; c < m; ++c) prow[c] *= inv;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == ur || w[k] == 0.0) continue;
      const double f = w[k];
      double* row = &binv_[k * m];
      for (std::size_t c = 0; c < m; ++c) row[c] -= f * prow[c];
    }
    ++since_refactor_;
  }

  [[nodiscard]] static bool fixed(double lo, double up) { return lo == up; }

  Outcome primal_loop(const std::vector<double>& c, long& iters) {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> y;
    std::vector<double> w;
    int degenerate_run = 0;
    bool fresh = false;
    constexpr double kPivTol = 1e-9;
    while (true) {
      if (iters >= opt_.max_iterations) return Outcome::iteration_limit;
      if (since_refactor_ >= opt_.refactor_interval) {
        if (!refactor()) return Outcome::numerical;
        compute_basic_values();
        fresh = true;
      }
      compute_duals(c, y);
      const bool bland = degenerate_run >= opt_.bland_after;
      int q = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const State s = state_[uj];
        if (s == State::basic || fixed(lo_[uj], up_[uj])) continue;
        const double d = reduced_cost(j, c, y);
        int jd = 0;
        if (s == State::at_lower && d < -opt_.opt_tol) jd = 1;
        else if (s == State::at_upper && d > opt_.opt_tol) jd = -1;
        else if (s == State::free_zero) jd = d < -opt_.opt_tol ? 1 : (d > opt_.opt_tol ? -1 : 0);
        if (jd == 0) continue;
        if (bland) {
          q = j;
          dir = jd;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = jd;
        }
      }
      if (q < 0) {
        if (!fresh && since_refactor_ > 0) {
          if (!refactor()) return Outcome::numerical;
          compute_basic_values();
          fresh = true;
          continue;
        }
        return Outcome::optimal;
      }
      ftran(q, w);
      const auto uq = static_cast<std::size_t>(q);
      const double range = (std::isfinite(lo_[uq]) && std::isfinite(up_[uq])) ? up_[uq] - lo_[uq] : kInf;

      int r = -1;
      double theta = kInf;
      if (!bland) {
        double theta_max = kInf;
        for (std::size_t i = 0; i < m; ++i) {
          if (std::abs(w[i]) <= kPivTol) continue;
          const double rate = -dir * w[i];
          const auto jb = static_cast<std::size_t>(head_[i]);
          double lim = kInf;
          if (rate < 0 && std::isfinite(lo_[jb])) lim = (x_[jb] - lo_[jb] + opt_.feas_tol) / -rate;
          else if (rate > 0 && std::isfinite(up_[jb])) lim = (up_[jb] - x_[jb] + opt_.feas_tol) / rate;
          theta_max = std::min(theta_max, lim);
        }
        if (theta_max == kInf && range == kInf) return Outcome::unbounded;
        double best_piv = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (std::abs(w[i]) <= kPivTol) continue;
          const double rate = -dir * w[i];
          const auto jb = static_cast<std::size_t>(head_[i]);
          double ex = kInf;
          if (rate < 0 && std::isfinite(lo_[jb])) ex = (x_[jb] - lo_[jb]) / -rate;
          else if (rate > 0 && std::isfinite(up_[jb])) ex = (up_[jb] - x_[jb]) / rate;
          if (ex <= theta_max && std::abs(w[i]) > best_piv) {
            best_piv = std::abs(w[i]);
            r = static_cast<int>(i);
            theta = std::max(0.0, ex);
          }
        }
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          if (std::abs(w[i]) <= kPivTol) continue;
          const double rate = -dir * w[i];
          const auto jb = static_cast<std::size_t>(head_[i]);
          double ex = kInf;
          if (rate < 0 && std::isfinite(lo_[jb])) ex = (x_[jb] - lo_[jb]) / -rate;
          else if (rate > 0 && std::isfinite(up_[jb])) ex = (up_[jb] - x_[jb]) / rate;
          if (ex == kInf) continue;
          ex = std::max(0.0, ex);
          if (r < 0 || ex < theta - 1e-12 || (ex <= theta + 1e-12 && head_[i] < head_[static_cast<std::size_t>(r)])) {
            r = static_cast<int>(i);
            theta = ex;
          }
        }
        if (r < 0 && range == kInf) return Outcome::unbounded;
      }

      const bool flip = range < kInf && (r < 0 || range <= theta);
      if (flip) theta = range;
      ++iters;
      degenerate_run = theta < 1e-12 ? degenerate_run + 1 : 0;
      fresh = false;
      x_[uq] += dir * theta;
      for (std::size_t i = 0; i < m; ++i) {
        if (w[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= dir * theta * w[i];
      }
      if (flip) {
        state_[uq] = dir > 0 ? State::at_upper : State::at_lower;
        x_[uq] = dir > 0 ? up_[uq] : lo_[uq];
        continue;
      }
      const auto ur = static_cast<std::size_t>(r);
      if (std::abs(w[ur]) < 1e-11) {
        if (!refactor()) return Outcome::numerical;
        compute_basic_values();
        continue;
      }
      const auto jb = static_cast<std::size_t>(head_[ur]);
      const double rate = -dir * w[ur];
      if (fixed(lo_[jb], up_[jb]) || rate < 0) {
        state_[jb] = State::at_lower;
        x_[jb] = lo_[jb];
      } else {
        state_[jb] = State::at_upper;
        x_[jb] = up_[jb];
      }
      head_[ur] = q;
      state_[uq] = State::basic;
      pivot(r, w);
    }
  }

  bool dual_feasible(const std::vector<double>& y) const {
    const double tol = 1e-7;
    for (int j = 0; j < ncols_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const State s = state_[uj];
      if (s == State::basic || fixed(lo_[uj], up_[uj])) continue;
      const double d = reduced_cost(j, cost_, y);
      if (s == State::at_lower && d < -tol) return false;
      if (s == State::at_upper && d > tol) return false;
      if (s == State::free_zero && std::abs(d) > tol) return false;
    }
    return true;
  }

  Outcome reoptimize(long& iters) {
    if (!refactor()) return Outcome::numerical;
    compute_basic_values();
    std::vector<double> y;
    compute_duals(cost_, y);
    if (!dual_feasible(y)) return Outcome::numerical;
    const Outcome r = dual_loop(iters);
    if (r != Outcome::optimal) return r;
    // Dual drift can leave a few wrong-signed reduced costs; finish primal.
    return primal_loop(cost_, iters);
  }

  Outcome dual_loop(long& iters) {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> y;
    std::vector<double> w;
    std::vector<double> rho(m);
    std::vector<double> alpha(static_cast<std::size_t>(ncols_));
    std::vector<double> dj(static_cast<std::size_t>(ncols_));
    constexpr double kPivTol = 1e-9;
    const long limit = iters + opt_.max_iterations;
    while (true) {
      if (iters >= limit) return Outcome::numerical;
      if (since_refactor_ >= opt_.refactor_interval) {
        if (!refactor()) return Outcome::numerical;
        compute_basic_values();
      }
      int r = -1;
      double worst = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto jb = static_cast<std::size_t>(head_[i]);
        const double tol = opt_.feas_tol * std::max(1.0, std::abs(x_[jb]));
        double v = 0.0;
        if (x_[jb] < lo_[jb] - tol) v = lo_[jb] - x_[jb];
        else if (x_[jb] > up_[jb] + tol) v = x_[jb] - up_[jb];
        if (v > worst) {
          worst = v;
          r = static_cast<int>(i);
        }
      }
      if (r < 0) return Outcome::optimal;
      const auto ur = static_cast<std::size_t>(r);
      const auto jl = static_cast<std::size_t>(head_[ur]);
      const bool to_lower = x_[jl] < lo_[jl];
      const double target = to_lower ? lo_[jl] : up_[jl];
      compute_duals(cost_, y);
      std::copy_n(binv_.begin() + static_cast<std::ptrdiff_t>(ur * m), m, rho.begin());

      // Harris two-pass dual ratio test.
      double theta_max = kInf;
      for (int j = 0; j < ncols_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        alpha[uj] = 0.0;
        const State s = state_[uj];
        if (s == State::basic || fixed(lo_[uj], up_[uj])) continue;
        double a = 0.0;
        for (const auto& [i, v] : col_[uj]) a += rho[static_cast<std::size_t>(i)] * v;
        alpha[uj] = a;
        if (!dual_eligible(s, a, to_lower, kPivTol)) continue;
        const double d = reduced_cost(j, cost_, y);
        dj[uj] = d;
        theta_max = std::min(theta_max, (std::abs(d) + opt_.opt_tol) / std::abs(a));
      }
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const State s = state_[uj];
        if (s == State::basic || fixed(lo_[uj], up_[uj])) continue;
        const double a = alpha[uj];
        if (!dual_eligible(s, a, to_lower, kPivTol)) continue;
        if (std::abs(dj[uj]) / std::abs(a) <= theta_max && std::abs(a) > best) {
          best = std::abs(a);
          q = j;
        }
      }
      if (q < 0) return Outcome::infeasible;
      ftran(q, w);
      if (std::abs(w[ur]) < 1e-11) return Outcome::numerical;
      const auto uq = static_cast<std::size_t>(q);
      const double step = (target - x_[jl]) / -w[ur];
      x_[uq] += step;
      for (std::size_t i = 0; i < m; ++i) {
        if (w[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= w[i] * step;
      }
      x_[jl] = target;
      state_[jl] = to_lower || fixed(lo_[jl], up_[jl]) ? State::at_lower : State::at_upper;
      head_[ur] = q;
      state_[uq] = State::basic;
      pivot(r, w);
      ++iters;
    }
  }

  static bool dual_eligible(State s, double a, bool to_lower, double tol) {
    // The leaving variable must move toward its violated bound.
    if (std::abs(a) <= tol) return false;
    const bool want_neg = to_lower;
    if (s == State::free_zero) return true;
    if (s == State::at_lower) return want_neg ? a < 0 : a > 0;
    return want_neg ? a > 0 : a < 0;
  }

  SolveOutcome finish(Outcome r, long iters) {
    SolveOutcome out;
    out.iterations = iters;
    switch (r) {
      case Outcome::optimal: out.status = SolveStatus::optimal; break;
      case Outcome::infeasible: out.status = SolveStatus::infeasible; break;
      case Outcome::unbounded: out.status = SolveStatus::unbounded; break;
      default: out.status = SolveStatus::iteration_limit; break;
    }
    out.primal.assign(x_.begin(), x_.begin() + n_);
    if (r == Outcome::infeasible && !warm_) {
      for (int i = 0; i < m_; ++i) {
        if (x_[static_cast<std::size_t>(art(i))] > opt_.feas_tol * 10) {
          out.infeasible_rows.push_back(row_names_[static_cast<std::size_t>(i)]);
        }
      }
    }
    warm_ = r == Outcome::optimal;
    if (r != Outcome::optimal) return out;
    std::vector<double> y;
    compute_duals(cost_, y);
    out.duals.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      out.duals[ui] = obj_sign_ * cost_scale_ * row_scale_[ui] * y[ui];
    }
    out.reduced_costs.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      out.reduced_costs[static_cast<std::size_t>(j)] = obj_sign_ * cost_scale_ * reduced_cost(j, cost_, y);
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
      obj += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    }
    out.objective = obj_sign_ * cost_scale_ * obj + obj_constant_;
    out.bound = out.objective;
    return out;
  }

  LpOptions opt_;
  int n_ = 0;
  int m_ = 0;
  int ncols_ = 0;
  std::vector<Column> col_;
  std::vector<double> lo_, up_, cost_, x_, b_, row_scale_, art_sign_;
  std::vector<std::string> row_names_;
  std::vector<State> state_;
  std::vector<int> head_;
  std::vector<double> binv_;
  double obj_sign_ = 1.0;
  double obj_constant_ = 0.0;
  double cost_scale_ = 1.0;
  double bmax_ = 1.0;
  int since_refactor_ = 0;
  bool warm_ = false;
};

/// Solves a linear program (integrality markers are ignored).
inline SolveOutcome solve_lp(const MathProgram& program, const LpOptions& options = {}) {
  SimplexEngine engine(program, options);
  return engine.solve_cold();
}

}  // namespace gtep::mp
