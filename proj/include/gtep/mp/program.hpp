#pragma once

// Solver-agnostic linear / mixed-integer program container.

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gtep::mp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { minimize, maximize };

/// Index of a variable inside a MathProgram.
struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

/// Index of a constraint row inside a MathProgram.
struct RowId {
  int index = -1;
  friend bool operator==(RowId, RowId) = default;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarType type = VarType::continuous;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

class MathProgram {
 public:
  MathProgram() = default;
  explicit MathProgram(std::string name) : name_(std::move(name)) {}

  VarId add_variable(std::string name, double lower, double upper,
                     VarType type = VarType::continuous) {
    if (type == VarType::binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
      throw std::invalid_argument("variable '" + name + "' has empty bounds");
    }
    vars_.push_back({std::move(name), lower, upper, type});
    objective_.push_back(0.0);
    return VarId{static_cast<int>(vars_.size()) - 1};
  }

  VarId add_binary(std::string name) {
    return add_variable(std::move(name), 0.0, 1.0, VarType::binary);
  }

  RowId add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                       double rhs) {
    for (const auto& t : terms) {
      check_var(t.var);
      if (!std::isfinite(t.coef)) {
        throw std::invalid_argument("non-finite coefficient in row '" + name + "'");
      }
    }
    if (std::isnan(rhs)) throw std::invalid_argument("NaN rhs in row '" + name + "'");
    rows_.push_back({std::move(name), std::move(terms), sense, rhs});
    return RowId{static_cast<int>(rows_.size()) - 1};
  }

  void set_objective_sense(ObjSense sense) { sense_ = sense; }
  void set_objective_constant(double c) { obj_constant_ = c; }

  void set_objective_coef(VarId v, double coef) {
    check_var(v);
    if (!std::isfinite(coef)) throw std::invalid_argument("non-finite objective coefficient");
    objective_[static_cast<std::size_t>(v.index)] = coef;
  }

  void add_objective_coef(VarId v, double coef) {
    check_var(v);
    objective_[static_cast<std::size_t>(v.index)] += coef;
  }

  void set_bounds(VarId v, double lower, double upper) {
    check_var(v);
    auto& var = vars_[static_cast<std::size_t>(v.index)];
    if (lower > upper) throw std::invalid_argument("empty bounds for '" + var.name + "'");
    var.lower = lower;
    var.upper = upper;
  }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] int num_variables() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] int num_constraints() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return rows_; }
  [[nodiscard]] const Variable& variable(VarId v) const { return vars_.at(static_cast<std::size_t>(v.index)); }
  [[nodiscard]] const Constraint& constraint(RowId r) const { return rows_.at(static_cast<std::size_t>(r.index)); }
  [[nodiscard]] const std::vector<double>& objective() const { return objective_; }
  [[nodiscard]] ObjSense objective_sense() const { return sense_; }
  [[nodiscard]] double objective_constant() const { return obj_constant_; }

  [[nodiscard]] bool has_integers() const {
    for (const auto& v : vars_) {
      if (v.type == VarType::binary) return true;
    }
    return false;
  }

  /// Objective value of an arbitrary point (including the constant term).
  [[nodiscard]] double evaluate_objective(const std::vector<double>& x) const {
    double s = obj_constant_;
    for (std::size_t j = 0; j < objective_.size(); ++j) s += objective_[j] * x.at(j);
    return s;
  }

  [[nodiscard]] double row_activity(const Constraint& row, const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : row.terms) s += t.coef * x.at(static_cast<std::size_t>(t.var.index));
    return s;
  }

  /// Largest bound or row violation at x, scaled by max(1, |rhs|).
  [[nodiscard]] double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const double scale = std::max(1.0, std::abs(x[j]));
      worst = std::max(worst, (vars_[j].lower - x[j]) / scale);
      worst = std::max(worst, (x[j] - vars_[j].upper) / scale);
    }
    for (const auto& row : rows_) {
      const double a = row_activity(row, x);
      const double scale = std::max(1.0, std::abs(row.rhs));
      double v = 0.0;
      switch (row.sense) {
        case RowSense::le: v = a - row.rhs; break;
        case RowSense::ge: v = row.rhs - a; break;
        case RowSense::eq: v = std::abs(a - row.rhs); break;
      }
      worst = std::max(worst, v / scale);
    }
    return worst;
  }

 private:
  void check_var(VarId v) const {
    if (v.index < 0 || v.index >= num_variables()) {
      throw std::out_of_range("undeclared variable index " + std::to_string(v.index));
    }
  }

  std::string name_;
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> objective_;
  double obj_constant_ = 0.0;
  ObjSense sense_ = ObjSense::minimize;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

/// Result of solve_lp / solve_mip. Duals and reduced costs are only filled for
/// LPs and follow the sensitivity convention d(objective)/d(rhs).
struct SolveOutcome {
  SolveStatus status = SolveStatus::iteration_limit;
  std::vector<double> primal;
  double objective = 0.0;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  /// Rows still violated when phase one stopped (infeasible LPs only).
  std::vector<std::string> infeasible_rows;
  long iterations = 0;
  long nodes = 0;
  /// Best proven bound (MIP); equals objective for LPs.
  double bound = 0.0;

  [[nodiscard]] bool optimal() const { return status == SolveStatus::optimal; }
  [[nodiscard]] double value(VarId v) const { return primal.at(static_cast<std::size_t>(v.index)); }
  [[nodiscard]] double dual(RowId r) const { return duals.at(static_cast<std::size_t>(r.index)); }
};

namespace detail {
inline void write_number(std::ostream& os, double v) {
  if (v == kInf) {
    os << "+inf";
  } else if (v == -kInf) {
    os << "-inf";
  } else {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    os << ss.str();
  }
}

inline void write_terms(std::ostream& os, const std::vector<Term>& terms,
                        const std::vector<Variable>& vars) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (const auto& t : terms) {
    os << (t.coef < 0 ? " - " : " + ");
    write_number(os, std::abs(t.coef));
    os << ' ' << vars[static_cast<std::size_t>(t.var.index)].name;
  }
}
}  // namespace detail

/// Writes a program in a CPLEX-LP-like plain text layout for debugging.
inline void write_lp_text(std::ostream& os, const MathProgram& p) {
  const auto& vars = p.variables();
  os << "\\ " << (p.name().empty() ? "program" : p.name()) << '\n';
  os << (p.objective_sense() == ObjSense::minimize ? "Minimize" : "Maximize") << "\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.objective()[static_cast<std::size_t>(j)] != 0.0) obj.push_back({VarId{j}, p.objective()[static_cast<std::size_t>(j)]});
  }
  detail::write_terms(os, obj, vars);
  if (p.objective_constant() != 0.0) {
    os << " + ";
    detail::write_number(os, p.objective_constant());
  }
  os << "\nSubject To\n";
  for (const auto& row : p.constraints()) {
    os << ' ' << row.name << ':';
    detail::write_terms(os, row.terms, vars);
    os << (row.sense == RowSense::le ? " <= " : row.sense == RowSense::ge ? " >= " : " = ");
    detail::write_number(os, row.rhs);
    os << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : vars) {
    os << ' ';
    detail::write_number(os, v.lower);
    os << " <= " << v.name << " <= ";
    detail::write_number(os, v.upper);
    os << '\n';
  }
  bool any_bin = false;
  for (const auto& v : vars) any_bin = any_bin || v.type == VarType::binary;
  if (any_bin) {
    os << "Binaries\n";
    for (const auto& v : vars) {
      if (v.type == VarType::binary) os << ' ' << v.name << '\n';
    }
  }
  os << "End\n";
}

}  // namespace gtep::mp
