#pragma once

// Planning-instance domain types, status expansion, uncertainty arithmetic and
// case validation.
//
// Periods are 1-based in every public signature (t = 1..N_y); per-period
// vectors are indexed with t - 1.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gtep {

/// Monetary amounts for investments and budgets are in millions of euros;
/// operational costs are in euros per MWh. This is the one conversion factor.
inline constexpr double kEurosPerMillion = 1e6;

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> violations)
      : std::runtime_error(what), violations_(std::move(violations)) {}
  [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Bus {
  std::string id;
  bool is_slack = false;
};

enum class LineStatus { existing, candidate };

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double susceptance = 0.0;  // magnitude, MW per rad
  double capacity_mw = 0.0;
  LineStatus status = LineStatus::existing;
  std::optional<double> invest_cost;  // M EUR

  [[nodiscard]] bool candidate() const { return status == LineStatus::candidate; }
};

enum class GenCategory { fixed, candidate_independent, candidate_phased, dismantled };

struct Generator {
  std::string id;
  std::string bus;
  double op_cost = 0.0;               // EUR/MWh
  std::optional<double> invest_cost;  // M EUR, candidates only
  double cap_nominal_mw = 0.0;
  double cap_deviation_mw = 0.0;
  GenCategory category = GenCategory::fixed;
  std::optional<std::string> group_id;
  std::optional<int> phase_order;
  std::optional<int> dismantle_period;

  [[nodiscard]] bool candidate() const {
    return category == GenCategory::candidate_independent || category == GenCategory::candidate_phased;
  }
};

struct GeneratorGroup {
  std::string group_id;
  std::vector<std::string> members;  // in phase order
};

struct Demand {
  std::string id;
  std::string bus;
  double load_nominal_mw = 0.0;
  double load_deviation_mw = 0.0;
  double shed_cost = 0.0;  // EUR/MWh
  std::vector<double> shed_fraction;      // e_j(t)
  std::vector<double> growth_mean;        // h_mu,j(t)
  std::vector<double> growth_dispersion;  // h_sigma,j(t)

  [[nodiscard]] double mean_factor(int t) const { return growth_mean.at(static_cast<std::size_t>(t - 1)); }
  [[nodiscard]] double dispersion_factor(int t) const { return growth_dispersion.at(static_cast<std::size_t>(t - 1)); }
  [[nodiscard]] double shed_limit(int t) const { return shed_fraction.at(static_cast<std::size_t>(t - 1)); }
  /// Load at period t with no deviation.
  [[nodiscard]] double nominal_load(int t) const { return load_nominal_mw * mean_factor(t); }
};

/// Per-period factors h(t) = (1 + rate)^(t-1).
inline std::vector<double> geometric_growth(double rate, int horizon) {
  std::vector<double> h(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) h[static_cast<std::size_t>(t - 1)] = std::pow(1.0 + rate, t - 1);
  return h;
}

struct GammaStep {
  int threshold = 0;
  int increment = 0;
  friend bool operator==(const GammaStep&, const GammaStep&) = default;
};

/// Step table for the generation budget: 1-2 new units add one, 3-4 add two,
/// five or more add three.
inline std::vector<GammaStep> default_gamma_steps() { return {{1, 1}, {3, 2}, {5, 3}}; }

struct PlanningConfig {
  int horizon_years = 1;
  double discount_rate = 0.0;
  double sigma_hours = 8760.0;
  double line_budget = 0.0;  // M EUR
  double gen_budget = 0.0;   // M EUR
  int gamma_d = 0;
  int gamma_g_base = 0;
  std::vector<GammaStep> gamma_g_steps;
};

struct CcgSettings {
  double epsilon = 1e-6;
  int max_iterations = 100;
};

struct NetworkCase {
  int schema_version = 1;
  std::string name;
  std::string provenance;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<GeneratorGroup> generator_groups;
  std::vector<Demand> demands;
  PlanningConfig planning;
  std::optional<CcgSettings> ccg;

  [[nodiscard]] int horizon() const { return planning.horizon_years; }

  [[nodiscard]] int bus_index(const std::string& id) const {
    for (std::size_t n = 0; n < buses.size(); ++n) {
      if (buses[n].id == id) return static_cast<int>(n);
    }
    throw std::out_of_range("unknown bus '" + id + "'");
  }

  [[nodiscard]] int slack_index() const {
    for (std::size_t n = 0; n < buses.size(); ++n) {
      if (buses[n].is_slack) return static_cast<int>(n);
    }
    throw std::logic_error("case has no slack bus");
  }

  [[nodiscard]] int line_index(const std::string& id) const {
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].id == id) return static_cast<int>(k);
    }
    throw std::out_of_range("unknown line '" + id + "'");
  }

  [[nodiscard]] int generator_index(const std::string& id) const {
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (generators[i].id == id) return static_cast<int>(i);
    }
    throw std::out_of_range("unknown generator '" + id + "'");
  }
};

/// Resolved bus positions of lines, generators and demands.
struct Topology {
  std::vector<int> line_from;
  std::vector<int> line_to;
  std::vector<int> gen_bus;
  std::vector<int> dem_bus;
  int slack = -1;

  explicit Topology(const NetworkCase& c) : slack(c.slack_index()) {
    for (const auto& l : c.lines) {
      line_from.push_back(c.bus_index(l.from_bus));
      line_to.push_back(c.bus_index(l.to_bus));
    }
    for (const auto& g : c.generators) gen_bus.push_back(c.bus_index(g.bus));
    for (const auto& d : c.demands) dem_bus.push_back(c.bus_index(d.bus));
  }
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_case(const NetworkCase& c) {
  ValidationReport rep;
  auto bad = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };
  const int ny = c.planning.horizon_years;

  std::set<std::string> bus_ids;
  int slack_count = 0;
  for (const auto& b : c.buses) {
    if (!bus_ids.insert(b.id).second) bad("duplicate bus id '" + b.id + "'");
    if (b.is_slack) ++slack_count;
  }
  if (c.buses.empty()) bad("case has no buses");
  if (slack_count == 0) bad("no slack bus");
  if (slack_count > 1) bad("multiple slack buses");

  std::set<std::string> line_ids;
  for (const auto& l : c.lines) {
    if (!line_ids.insert(l.id).second) bad("duplicate line id '" + l.id + "'");
    if (!bus_ids.count(l.from_bus)) bad("line '" + l.id + "': dangling from_bus '" + l.from_bus + "'");
    if (!bus_ids.count(l.to_bus)) bad("line '" + l.id + "': dangling to_bus '" + l.to_bus + "'");
    if (l.from_bus == l.to_bus) bad("line '" + l.id + "': from_bus equals to_bus");
    if (!(l.capacity_mw > 0.0)) bad("line '" + l.id + "': nonpositive capacity_mw");
    if (!(l.susceptance > 0.0)) bad("line '" + l.id + "': nonpositive susceptance");
    if (l.candidate() && !l.invest_cost) bad("line '" + l.id + "': candidate without invest_cost");
    if (l.invest_cost && *l.invest_cost < 0.0) bad("line '" + l.id + "': negative invest_cost");
  }

  std::set<std::string> gen_ids;
  for (const auto& g : c.generators) {
    if (!gen_ids.insert(g.id).second) bad("duplicate generator id '" + g.id + "'");
    if (!bus_ids.count(g.bus)) bad("generator '" + g.id + "': dangling bus '" + g.bus + "'");
    if (g.cap_nominal_mw < 0.0) bad("generator '" + g.id + "': negative cap_nominal_mw");
    if (g.cap_deviation_mw < 0.0 || g.cap_deviation_mw > g.cap_nominal_mw) {
      bad("generator '" + g.id + "': cap_deviation_mw outside [0, cap_nominal_mw]");
    }
    if (g.op_cost < 0.0) bad("generator '" + g.id + "': negative op_cost");
    if (g.candidate() && !g.invest_cost) bad("generator '" + g.id + "': candidate without invest_cost");
    if (g.invest_cost && *g.invest_cost < 0.0) bad("generator '" + g.id + "': negative invest_cost");
    if (g.category == GenCategory::dismantled) {
      if (!g.dismantle_period || *g.dismantle_period < 1 || *g.dismantle_period > ny) {
        bad("generator '" + g.id + "': dismantle period out of range");
      }
    }
    if (g.category == GenCategory::candidate_phased) {
      if (!g.group_id || !g.phase_order) bad("generator '" + g.id + "': phased without group_id/phase_order");
    } else if (g.group_id || g.phase_order) {
      bad("generator '" + g.id + "': group membership on a non-phased generator");
    }
  }

  std::set<std::string> group_ids;
  std::set<std::string> grouped;
  for (const auto& grp : c.generator_groups) {
    if (!group_ids.insert(grp.group_id).second) bad("duplicate group id '" + grp.group_id + "'");
    if (grp.members.empty()) bad("group '" + grp.group_id + "': no members");
    std::vector<int> phases;
    for (std::size_t p = 0; p < grp.members.size(); ++p) {
      const auto& mid = grp.members[p];
      if (!grouped.insert(mid).second) bad("generator '" + mid + "' listed in more than one group slot");
      const auto it = std::find_if(c.generators.begin(), c.generators.end(),
                                   [&](const Generator& g) { return g.id == mid; });
      if (it == c.generators.end()) {
        bad("group '" + grp.group_id + "': dangling member '" + mid + "'");
        continue;
      }
      if (it->category != GenCategory::candidate_phased) {
        bad("group '" + grp.group_id + "': member '" + mid + "' is not candidate_phased");
        continue;
      }
      if (it->group_id != grp.group_id) bad("group '" + grp.group_id + "': member '" + mid + "' names another group");
      if (it->phase_order) phases.push_back(*it->phase_order);
    }
    std::vector<int> sorted = phases;
    std::sort(sorted.begin(), sorted.end());
    bool contiguous = true;
    for (std::size_t p = 0; p < sorted.size(); ++p) contiguous = contiguous && sorted[p] == static_cast<int>(p) + 1;
    if (!contiguous) bad("group '" + grp.group_id + "': non-contiguous phases");
    else if (sorted != phases) bad("group '" + grp.group_id + "': members not listed in phase order");
  }
  for (const auto& g : c.generators) {
    if (g.category == GenCategory::candidate_phased && !grouped.count(g.id)) {
      bad("generator '" + g.id + "': phased generator missing from generator_groups");
    }
  }

  std::set<std::string> dem_ids;
  for (const auto& d : c.demands) {
    if (!dem_ids.insert(d.id).second) bad("duplicate demand id '" + d.id + "'");
    if (!bus_ids.count(d.bus)) bad("demand '" + d.id + "': dangling bus '" + d.bus + "'");
    if (d.load_nominal_mw < 0.0) bad("demand '" + d.id + "': negative load_nominal_mw");
    if (d.load_deviation_mw < 0.0) bad("demand '" + d.id + "': negative load_deviation_mw");
    if (d.shed_cost < 0.0) bad("demand '" + d.id + "': negative shed_cost");
    const auto size_ok = [&](const std::vector<double>& v) { return static_cast<int>(v.size()) == ny; };
    if (!size_ok(d.shed_fraction) || !size_ok(d.growth_mean) || !size_ok(d.growth_dispersion)) {
      bad("demand '" + d.id + "': per-period series must have horizon_years entries");
      continue;
    }
    for (double e : d.shed_fraction) {
      if (e < 0.0 || e > 1.0) {
        bad("demand '" + d.id + "': shed_fraction outside [0,1]");
        break;
      }
    }
    for (std::size_t t = 0; t < d.growth_mean.size(); ++t) {
      if (!(d.growth_mean[t] > 0.0) || !(d.growth_dispersion[t] > 0.0)) {
        bad("demand '" + d.id + "': growth factors must be positive");
        break;
      }
    }
  }

  const auto& pc = c.planning;
  if (pc.horizon_years < 1) bad("planning: horizon_years < 1");
  if (pc.discount_rate < 0.0) bad("planning: negative discount_rate");
  if (!(pc.sigma_hours > 0.0)) bad("planning: sigma_hours must be positive");
  if (pc.line_budget < 0.0 || pc.gen_budget < 0.0) bad("planning: negative budget");
  if (pc.gamma_d < 0) bad("planning: negative gamma_d");
  if (pc.gamma_d > static_cast<int>(c.demands.size())) bad("planning: gamma_d exceeds number of demands");
  if (pc.gamma_g_base < 0) bad("planning: negative gamma_g_base");
  for (std::size_t s = 0; s < pc.gamma_g_steps.size(); ++s) {
    if (pc.gamma_g_steps[s].threshold < 0) bad("planning: negative gamma_g_steps threshold");
    if (s > 0 && pc.gamma_g_steps[s].threshold <= pc.gamma_g_steps[s - 1].threshold) {
      bad("planning: gamma_g_steps thresholds not strictly increasing");
    }
    if (s > 0 && pc.gamma_g_steps[s].increment < pc.gamma_g_steps[s - 1].increment) {
      bad("planning: gamma_g_steps increments decrease");
    }
    if (pc.gamma_g_steps[s].increment < 0) bad("planning: negative gamma_g_steps increment");
  }
  if (c.ccg && !(c.ccg->epsilon > 0.0)) bad("ccg: epsilon must be positive");
  if (c.ccg && c.ccg->max_iterations < 1) bad("ccg: max_iterations must be positive");
  return rep;
}

inline void require_valid(const NetworkCase& c) {
  auto rep = validate_case(c);
  if (!rep.ok()) {
    std::string msg = "invalid case: " + rep.violations.front();
    if (rep.violations.size() > 1) msg += " (+" + std::to_string(rep.violations.size() - 1) + " more)";
    throw ValidationError(msg, std::move(rep.violations));
  }
}

// ---------------------------------------------------------------------------
// Plans and statuses

/// First-stage build decisions: line_build[k][t-1], gen_build[i][t-1] in {0,1},
/// sized to every line / generator of the case (non-candidates stay zero).
struct InvestmentPlan {
  std::vector<std::vector<int>> line_build;
  std::vector<std::vector<int>> gen_build;

  static InvestmentPlan empty(const NetworkCase& c) {
    const auto ny = static_cast<std::size_t>(c.horizon());
    return {std::vector<std::vector<int>>(c.lines.size(), std::vector<int>(ny, 0)),
            std::vector<std::vector<int>>(c.generators.size(), std::vector<int>(ny, 0))};
  }

  /// Period in which line k is built, 0 when never.
  [[nodiscard]] int line_period(std::size_t k) const { return first_one(line_build.at(k)); }
  [[nodiscard]] int gen_period(std::size_t i) const { return first_one(gen_build.at(i)); }

  void build_line(std::size_t k, int t) { line_build.at(k).at(static_cast<std::size_t>(t - 1)) = 1; }
  void build_gen(std::size_t i, int t) { gen_build.at(i).at(static_cast<std::size_t>(t - 1)) = 1; }

  friend bool operator==(const InvestmentPlan&, const InvestmentPlan&) = default;

 private:
  static int first_one(const std::vector<int>& v) {
    for (std::size_t t = 0; t < v.size(); ++t) {
      if (v[t] != 0) return static_cast<int>(t) + 1;
    }
    return 0;
  }
};

/// Status of every asset in one period.
struct PeriodStatus {
  std::vector<int> line;
  std::vector<int> gen;
  friend bool operator==(const PeriodStatus&, const PeriodStatus&) = default;
  friend auto operator<=>(const PeriodStatus&, const PeriodStatus&) = default;
};

struct StatusSchedule {
  std::vector<std::vector<int>> line_status;  // [k][t-1]
  std::vector<std::vector<int>> gen_status;   // [i][t-1]

  [[nodiscard]] PeriodStatus at(int t) const {
    PeriodStatus s;
    const auto ut = static_cast<std::size_t>(t - 1);
    for (const auto& l : line_status) s.line.push_back(l.at(ut));
    for (const auto& g : gen_status) s.gen.push_back(g.at(ut));
    return s;
  }
  friend bool operator==(const StatusSchedule&, const StatusSchedule&) = default;
};

/// Checks plan shape, binary entries, build-once and that only candidates are built.
inline void check_plan_shape(const InvestmentPlan& plan, const NetworkCase& c) {
  const auto ny = static_cast<std::size_t>(c.horizon());
  if (plan.line_build.size() != c.lines.size() || plan.gen_build.size() != c.generators.size()) {
    throw std::invalid_argument("plan does not match case asset counts");
  }
  auto check = [&](const std::vector<int>& row, bool candidate, const std::string& id) {
    if (row.size() != ny) throw std::invalid_argument("plan row for '" + id + "' has wrong period count");
    int sum = 0;
    for (int v : row) {
      if (v != 0 && v != 1) throw std::invalid_argument("plan entry for '" + id + "' is not binary");
      sum += v;
    }
    if (sum > 1) throw std::invalid_argument("build-once violated for '" + id + "'");
    if (sum > 0 && !candidate) throw std::invalid_argument("non-candidate asset '" + id + "' is built");
  };
  for (std::size_t k = 0; k < c.lines.size(); ++k) check(plan.line_build[k], c.lines[k].candidate(), c.lines[k].id);
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    check(plan.gen_build[i], c.generators[i].candidate(), c.generators[i].id);
  }
}

inline StatusSchedule expand_statuses(const InvestmentPlan& plan, const NetworkCase& c) {
  check_plan_shape(plan, c);
  const int ny = c.horizon();
  StatusSchedule s;
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    std::vector<int> st(static_cast<std::size_t>(ny), 1);
    if (c.lines[k].candidate()) {
      int acc = 0;
      for (int t = 1; t <= ny; ++t) {
        acc += plan.line_build[k][static_cast<std::size_t>(t - 1)];
        st[static_cast<std::size_t>(t - 1)] = acc;
      }
    }
    s.line_status.push_back(std::move(st));
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto& g = c.generators[i];
    std::vector<int> st(static_cast<std::size_t>(ny), 1);
    if (g.candidate()) {
      int acc = 0;
      for (int t = 1; t <= ny; ++t) {
        acc += plan.gen_build[i][static_cast<std::size_t>(t - 1)];
        st[static_cast<std::size_t>(t - 1)] = acc;
      }
    } else if (g.category == GenCategory::dismantled) {
      for (int t = 1; t <= ny; ++t) st[static_cast<std::size_t>(t - 1)] = t <= *g.dismantle_period ? 1 : 0;
    }
    s.gen_status.push_back(std::move(st));
  }
  return s;
}

inline double discount_factor(double rate, int t) {
  if (t < 1) throw std::invalid_argument("discount_factor: period must be >= 1");
  return 1.0 / std::pow(1.0 + rate, t - 1);
}

/// Generation uncertainty budget for a given number of active candidate units.
inline int gamma_g_budget(const PlanningConfig& config, int n_new_active) {
  if (n_new_active < 0) throw std::invalid_argument("gamma_g_budget: negative count");
  int inc = 0;
  for (const auto& step : config.gamma_g_steps) {
    if (step.threshold <= n_new_active) inc = step.increment;
  }
  return config.gamma_g_base + inc;
}

/// Candidate generators active in the period ("new active" units).
inline int count_new_active(const NetworkCase& c, const PeriodStatus& s) {
  int n = 0;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (c.generators[i].candidate() && s.gen.at(i) == 1) ++n;
  }
  return n;
}

inline int gamma_g_for(const NetworkCase& c, const PeriodStatus& s) {
  return gamma_g_budget(c.planning, count_new_active(c, s));
}

// ---------------------------------------------------------------------------
// Uncertainty

struct UncertaintyRealization {
  int period = 1;
  std::vector<int> z_gen;
  std::vector<int> z_dem;
  std::vector<double> u_gen;  // available capacity, MW
  std::vector<double> u_dem;  // load, MW

  /// Identity is the deviation pattern; capacities follow from it.
  friend bool operator==(const UncertaintyRealization& a, const UncertaintyRealization& b) {
    return a.period == b.period && a.z_gen == b.z_gen && a.z_dem == b.z_dem;
  }
};

inline double realized_capacity(const Generator& g, int z) {
  return g.cap_nominal_mw - g.cap_deviation_mw * z;
}

inline double realized_load(const Demand& d, int t, int z) {
  return d.load_nominal_mw * d.mean_factor(t) + d.load_deviation_mw * d.dispersion_factor(t) * z;
}

inline UncertaintyRealization realize_uncertainty(const NetworkCase& c, const PeriodStatus& status,
                                                  const std::vector<int>& z_gen,
                                                  const std::vector<int>& z_dem, int t) {
  if (t < 1 || t > c.horizon()) throw std::invalid_argument("realize_uncertainty: period out of range");
  if (z_gen.size() != c.generators.size() || z_dem.size() != c.demands.size()) {
    throw std::invalid_argument("realize_uncertainty: deviation vector size mismatch");
  }
  int sum_g = 0;
  for (std::size_t i = 0; i < z_gen.size(); ++i) {
    if (z_gen[i] != 0 && z_gen[i] != 1) throw std::invalid_argument("realize_uncertainty: z_gen not binary");
    if (z_gen[i] > status.gen.at(i)) {
      throw std::invalid_argument("realize_uncertainty: deviation on inactive generator '" + c.generators[i].id + "'");
    }
    sum_g += z_gen[i];
  }
  int sum_d = 0;
  for (int z : z_dem) {
    if (z != 0 && z != 1) throw std::invalid_argument("realize_uncertainty: z_dem not binary");
    sum_d += z;
  }
  if (sum_g > gamma_g_for(c, status)) throw std::invalid_argument("realize_uncertainty: generation budget exceeded");
  if (sum_d > c.planning.gamma_d) throw std::invalid_argument("realize_uncertainty: demand budget exceeded");

  UncertaintyRealization r{t, z_gen, z_dem, {}, {}};
  for (std::size_t i = 0; i < z_gen.size(); ++i) r.u_gen.push_back(realized_capacity(c.generators[i], z_gen[i]));
  for (std::size_t j = 0; j < z_dem.size(); ++j) r.u_dem.push_back(realized_load(c.demands[j], t, z_dem[j]));
  return r;
}

inline UncertaintyRealization nominal_realization(const NetworkCase& c, const PeriodStatus& status, int t) {
  return realize_uncertainty(c, status, std::vector<int>(c.generators.size(), 0),
                             std::vector<int>(c.demands.size(), 0), t);
}

// ---------------------------------------------------------------------------
// Investment cost of a plan

/// Undiscounted investment spent in period t (M EUR).
inline double period_investment(const InvestmentPlan& plan, const NetworkCase& c, int t) {
  const auto ut = static_cast<std::size_t>(t - 1);
  double s = 0.0;
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (plan.line_build.at(k).at(ut)) s += c.lines[k].invest_cost.value_or(0.0);
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (plan.gen_build.at(i).at(ut)) s += c.generators[i].invest_cost.value_or(0.0);
  }
  return s;
}

struct InvestmentNpc {
  double line_npc = 0.0;  // M EUR
  double gen_npc = 0.0;   // M EUR
  [[nodiscard]] double total() const { return line_npc + gen_npc; }
};

inline InvestmentNpc investment_npc(const InvestmentPlan& plan, const NetworkCase& c) {
  check_plan_shape(plan, c);
  InvestmentNpc npc;
  for (int t = 1; t <= c.horizon(); ++t) {
    const double df = discount_factor(c.planning.discount_rate, t);
    const auto ut = static_cast<std::size_t>(t - 1);
    for (std::size_t k = 0; k < c.lines.size(); ++k) {
      if (plan.line_build[k][ut]) npc.line_npc += df * c.lines[k].invest_cost.value_or(0.0);
    }
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
      if (plan.gen_build[i][ut]) npc.gen_npc += df * c.generators[i].invest_cost.value_or(0.0);
    }
  }
  return npc;
}

/// Discounted contribution of one period's operating cost (EUR, sigma-weighted)
/// to the objective in M EUR.
inline double discounted_operation(const PlanningConfig& p, int t, double c_op) {
  return discount_factor(p.discount_rate, t) * c_op / (kEurosPerMillion * (1.0 + p.discount_rate));
}

/// Budgets and phased ordering; returns the first violation or an empty string.
inline std::string plan_violation(const InvestmentPlan& plan, const NetworkCase& c, double tol = 1e-9) {
  check_plan_shape(plan, c);
  const auto npc = investment_npc(plan, c);
  if (npc.line_npc > c.planning.line_budget * (1.0 + tol) + tol) return "line budget exceeded";
  if (npc.gen_npc > c.planning.gen_budget * (1.0 + tol) + tol) return "generation budget exceeded";
  for (const auto& grp : c.generator_groups) {
    for (std::size_t p = 1; p < grp.members.size(); ++p) {
      const int prev = plan.gen_period(static_cast<std::size_t>(c.generator_index(grp.members[p - 1])));
      const int cur = plan.gen_period(static_cast<std::size_t>(c.generator_index(grp.members[p])));
      if (cur != 0 && (prev == 0 || cur <= prev)) {
        return "phase order violated in group '" + grp.group_id + "' at '" + grp.members[p] + "'";
      }
    }
  }
  return {};
}

}  // namespace gtep
