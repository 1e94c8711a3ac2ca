#pragma once

// Case files, plan files and run reports. Case files are UTF-8 JSON with
// snake_case keys; unknown keys are rejected so typos never pass silently.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtep/ccg.hpp"
#include "gtep/model.hpp"
#include "gtep/opf.hpp"
#include "json.hpp"

namespace gtep {

using Json = nlohmann::ordered_json;

/// Malformed JSON or a field of the wrong shape; carries the field path.
class CaseFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] const Json& json() const { return j_; }

  void allow(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail(path_, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail(child(k), "unknown field");
    }
  }
  [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  [[nodiscard]] Reader at(const char* key) const {
    if (!j_.contains(key)) fail(child(key), "missing field");
    return {j_.at(key), child(key)};
  }
  [[nodiscard]] std::vector<Reader> items() const {
    if (!j_.is_array()) fail(path_, "expected an array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }
  [[nodiscard]] double number() const {
    if (!j_.is_number()) fail(path_, "expected a number");
    return j_.get<double>();
  }
  [[nodiscard]] int integer() const {
    if (!j_.is_number_integer()) fail(path_, "expected an integer");
    return j_.get<int>();
  }
  [[nodiscard]] bool boolean() const {
    if (!j_.is_boolean()) fail(path_, "expected true or false");
    return j_.get<bool>();
  }
  [[nodiscard]] std::string string() const {
    if (!j_.is_string()) fail(path_, "expected a string");
    return j_.get<std::string>();
  }
  /// A per-period series: an array of length n, or one number repeated.
  [[nodiscard]] std::vector<double> series(int n) const {
    if (j_.is_number()) return std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), number());
    std::vector<double> out;
    for (const auto& r : items()) out.push_back(r.number());
    if (static_cast<int>(out.size()) != n) {
      fail(path_, "expected " + std::to_string(n) + " per-period values, got " + std::to_string(out.size()));
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw CaseFormatError(where + ": " + what);
  }

 private:
  [[nodiscard]] std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const Json& j_;
  std::string path_;
};

inline const char* line_status_name(LineStatus s) { return s == LineStatus::candidate ? "candidate" : "existing"; }

inline const char* category_name(GenCategory g) {
  switch (g) {
    case GenCategory::fixed: return "fixed";
    case GenCategory::candidate_independent: return "candidate_independent";
    case GenCategory::candidate_phased: return "candidate_phased";
    case GenCategory::dismantled: return "dismantled";
  }
  return "fixed";
}

inline GenCategory parse_category(const Reader& r) {
  const auto s = r.string();
  for (auto g : {GenCategory::fixed, GenCategory::candidate_independent, GenCategory::candidate_phased,
                 GenCategory::dismantled}) {
    if (s == category_name(g)) return g;
  }
  Reader::fail(r.path(), "unknown category '" + s + "'");
}

inline LineStatus parse_line_status(const Reader& r) {
  const auto s = r.string();
  if (s == "existing") return LineStatus::existing;
  if (s == "candidate") return LineStatus::candidate;
  Reader::fail(r.path(), "unknown status '" + s + "'");
}

inline Json series_json(const std::vector<double>& v) { return Json(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Case files

inline NetworkCase case_from_json(const Json& j) {
  using detail::Reader;
  const Reader root(j, "");
  root.allow({"schema_version", "name", "provenance", "buses", "lines", "generators", "generator_groups", "demands",
              "planning", "ccg"});
  NetworkCase c;
  c.schema_version = root.at("schema_version").integer();
  if (c.schema_version != 1) Reader::fail("schema_version", "unsupported version " + std::to_string(c.schema_version));
  if (root.has("name")) c.name = root.at("name").string();
  if (root.has("provenance")) c.provenance = root.at("provenance").string();

  const auto pr = root.at("planning");
  pr.allow({"horizon_years", "discount_rate", "sigma_hours", "line_budget", "gen_budget", "gamma_d", "gamma_g_base",
            "gamma_g_steps"});
  auto& p = c.planning;
  p.horizon_years = pr.at("horizon_years").integer();
  if (p.horizon_years < 1) Reader::fail("planning.horizon_years", "must be at least 1");
  p.discount_rate = pr.at("discount_rate").number();
  p.sigma_hours = pr.at("sigma_hours").number();
  p.line_budget = pr.at("line_budget").number();
  p.gen_budget = pr.at("gen_budget").number();
  p.gamma_d = pr.at("gamma_d").integer();
  p.gamma_g_base = pr.at("gamma_g_base").integer();
  if (pr.has("gamma_g_steps")) {
    for (const auto& s : pr.at("gamma_g_steps").items()) {
      s.allow({"threshold", "increment"});
      p.gamma_g_steps.push_back({s.at("threshold").integer(), s.at("increment").integer()});
    }
  }
  const int ny = p.horizon_years;

  for (const auto& r : root.at("buses").items()) {
    r.allow({"id", "is_slack"});
    c.buses.push_back({r.at("id").string(), r.has("is_slack") && r.at("is_slack").boolean()});
  }
  for (const auto& r : root.at("lines").items()) {
    r.allow({"id", "from_bus", "to_bus", "susceptance", "capacity_mw", "status", "invest_cost"});
    Line l;
    l.id = r.at("id").string();
    l.from_bus = r.at("from_bus").string();
    l.to_bus = r.at("to_bus").string();
    l.susceptance = r.at("susceptance").number();
    l.capacity_mw = r.at("capacity_mw").number();
    if (r.has("status")) l.status = detail::parse_line_status(r.at("status"));
    if (r.has("invest_cost")) l.invest_cost = r.at("invest_cost").number();
    c.lines.push_back(std::move(l));
  }
  for (const auto& r : root.at("generators").items()) {
    r.allow({"id", "bus", "op_cost", "invest_cost", "cap_nominal_mw", "cap_deviation_mw", "category", "group_id",
             "phase_order", "dismantle_period"});
    Generator g;
    g.id = r.at("id").string();
    g.bus = r.at("bus").string();
    g.op_cost = r.at("op_cost").number();
    if (r.has("invest_cost")) g.invest_cost = r.at("invest_cost").number();
    g.cap_nominal_mw = r.at("cap_nominal_mw").number();
    g.cap_deviation_mw = r.has("cap_deviation_mw") ? r.at("cap_deviation_mw").number() : 0.0;
    if (r.has("category")) g.category = detail::parse_category(r.at("category"));
    if (r.has("group_id")) g.group_id = r.at("group_id").string();
    if (r.has("phase_order")) g.phase_order = r.at("phase_order").integer();
    if (r.has("dismantle_period")) g.dismantle_period = r.at("dismantle_period").integer();
    c.generators.push_back(std::move(g));
  }
  if (root.has("generator_groups")) {
    for (const auto& r : root.at("generator_groups").items()) {
      r.allow({"group_id", "members"});
      GeneratorGroup grp;
      grp.group_id = r.at("group_id").string();
      for (const auto& m : r.at("members").items()) grp.members.push_back(m.string());
      c.generator_groups.push_back(std::move(grp));
    }
  }
  for (const auto& r : root.at("demands").items()) {
    r.allow({"id", "bus", "load_nominal_mw", "load_deviation_mw", "shed_cost", "shed_fraction", "growth_mean",
             "growth_dispersion"});
    Demand d;
    d.id = r.at("id").string();
    d.bus = r.at("bus").string();
    d.load_nominal_mw = r.at("load_nominal_mw").number();
    d.load_deviation_mw = r.has("load_deviation_mw") ? r.at("load_deviation_mw").number() : 0.0;
    d.shed_cost = r.at("shed_cost").number();
    d.shed_fraction = r.has("shed_fraction") ? r.at("shed_fraction").series(ny) : std::vector<double>(ny, 1.0);
    d.growth_mean = r.has("growth_mean") ? r.at("growth_mean").series(ny) : std::vector<double>(ny, 1.0);
    d.growth_dispersion =
        r.has("growth_dispersion") ? r.at("growth_dispersion").series(ny) : std::vector<double>(ny, 1.0);
    c.demands.push_back(std::move(d));
  }
  if (root.has("ccg")) {
    const auto r = root.at("ccg");
    r.allow({"epsilon", "max_iterations"});
    CcgSettings s;
    if (r.has("epsilon")) s.epsilon = r.at("epsilon").number();
    if (r.has("max_iterations")) s.max_iterations = r.at("max_iterations").integer();
    c.ccg = s;
  }
  return c;
}

/// Canonical form: every key written, per-period series as full arrays.
inline Json case_to_json(const NetworkCase& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["provenance"] = c.provenance;
  j["buses"] = Json::array();
  for (const auto& b : c.buses) j["buses"].push_back({{"id", b.id}, {"is_slack", b.is_slack}});
  j["lines"] = Json::array();
  for (const auto& l : c.lines) {
    Json r = {{"id", l.id},
              {"from_bus", l.from_bus},
              {"to_bus", l.to_bus},
              {"susceptance", l.susceptance},
              {"capacity_mw", l.capacity_mw},
              {"status", detail::line_status_name(l.status)}};
    if (l.invest_cost) r["invest_cost"] = *l.invest_cost;
    j["lines"].push_back(std::move(r));
  }
  j["generators"] = Json::array();
  for (const auto& g : c.generators) {
    Json r = {{"id", g.id}, {"bus", g.bus}, {"op_cost", g.op_cost}};
    if (g.invest_cost) r["invest_cost"] = *g.invest_cost;
    r["cap_nominal_mw"] = g.cap_nominal_mw;
    r["cap_deviation_mw"] = g.cap_deviation_mw;
    r["category"] = detail::category_name(g.category);
    if (g.group_id) r["group_id"] = *g.group_id;
    if (g.phase_order) r["phase_order"] = *g.phase_order;
    if (g.dismantle_period) r["dismantle_period"] = *g.dismantle_period;
    j["generators"].push_back(std::move(r));
  }
  j["generator_groups"] = Json::array();
  for (const auto& grp : c.generator_groups) {
    j["generator_groups"].push_back({{"group_id", grp.group_id}, {"members", grp.members}});
  }
  j["demands"] = Json::array();
  for (const auto& d : c.demands) {
    j["demands"].push_back({{"id", d.id},
                            {"bus", d.bus},
                            {"load_nominal_mw", d.load_nominal_mw},
                            {"load_deviation_mw", d.load_deviation_mw},
                            {"shed_cost", d.shed_cost},
                            {"shed_fraction", detail::series_json(d.shed_fraction)},
                            {"growth_mean", detail::series_json(d.growth_mean)},
                            {"growth_dispersion", detail::series_json(d.growth_dispersion)}});
  }
  const auto& p = c.planning;
  Json steps = Json::array();
  for (const auto& s : p.gamma_g_steps) steps.push_back({{"threshold", s.threshold}, {"increment", s.increment}});
  j["planning"] = {{"horizon_years", p.horizon_years}, {"discount_rate", p.discount_rate},
                   {"sigma_hours", p.sigma_hours},     {"line_budget", p.line_budget},
                   {"gen_budget", p.gen_budget},       {"gamma_d", p.gamma_d},
                   {"gamma_g_base", p.gamma_g_base},   {"gamma_g_steps", steps}};
  if (c.ccg) j["ccg"] = {{"epsilon", c.ccg->epsilon}, {"max_iterations", c.ccg->max_iterations}};
  return j;
}

inline std::string case_to_string(const NetworkCase& c) { return case_to_json(c).dump(2) + "\n"; }

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CaseFormatError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CaseFormatError(path.string() + ": " + e.what());
  }
}

inline NetworkCase parse_case(const std::string& text) {
  try {
    return case_from_json(Json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw CaseFormatError(e.what());
  }
}

/// Parse and validate; shape errors carry the field path, rule violations
/// carry the asset id and field.
inline NetworkCase load_case(const std::filesystem::path& path) {
  NetworkCase c;
  try {
    c = case_from_json(read_json_file(path));
  } catch (const CaseFormatError& e) {
    const std::string msg = e.what();
    throw CaseFormatError(msg.rfind(path.string(), 0) == 0 ? msg : path.string() + ": " + msg);
  }
  const auto rep = validate_case(c);
  if (!rep.ok()) throw ValidationError(path.string() + ": " + rep.violations.front(), rep.violations);
  return c;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

inline void save_case(const NetworkCase& c, const std::filesystem::path& path) { write_text(path, case_to_string(c)); }

// ---------------------------------------------------------------------------
// Plan files

inline Json plan_to_json(const InvestmentPlan& plan, const NetworkCase& c) {
  Json lines = Json::array();
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (const int t = plan.line_period(k)) lines.push_back({{"id", c.lines[k].id}, {"period", t}});
  }
  Json gens = Json::array();
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (const int t = plan.gen_period(i)) gens.push_back({{"id", c.generators[i].id}, {"period", t}});
  }
  return {{"line_builds", lines}, {"generator_builds", gens}};
}

/// Accepts a bare plan object or any object holding one under "plan".
inline InvestmentPlan plan_from_json(const Json& j, const NetworkCase& c) {
  using detail::Reader;
  if (j.is_object() && j.contains("plan")) return plan_from_json(j.at("plan"), c);
  const Reader root(j, "plan");
  root.allow({"line_builds", "generator_builds"});
  auto plan = InvestmentPlan::empty(c);
  auto period_of = [&](const Reader& r) {
    const int t = r.at("period").integer();
    if (t < 1 || t > c.horizon()) Reader::fail(r.path() + ".period", "outside 1.." + std::to_string(c.horizon()));
    return t;
  };
  if (root.has("line_builds")) {
    for (const auto& r : root.at("line_builds").items()) {
      r.allow({"id", "period"});
      const auto id = r.at("id").string();
      int k = -1;
      try {
        k = c.line_index(id);
      } catch (const std::out_of_range&) {
        Reader::fail(r.path() + ".id", "unknown line '" + id + "'");
      }
      if (!c.lines[static_cast<std::size_t>(k)].candidate()) Reader::fail(r.path() + ".id", "line '" + id + "' is not a candidate");
      plan.build_line(static_cast<std::size_t>(k), period_of(r));
    }
  }
  if (root.has("generator_builds")) {
    for (const auto& r : root.at("generator_builds").items()) {
      r.allow({"id", "period"});
      const auto id = r.at("id").string();
      int i = -1;
      try {
        i = c.generator_index(id);
      } catch (const std::out_of_range&) {
        Reader::fail(r.path() + ".id", "unknown generator '" + id + "'");
      }
      if (!c.generators[static_cast<std::size_t>(i)].candidate()) {
        Reader::fail(r.path() + ".id", "generator '" + id + "' is not a candidate");
      }
      plan.build_gen(static_cast<std::size_t>(i), period_of(r));
    }
  }
  return plan;
}

inline InvestmentPlan load_plan(const std::filesystem::path& path, const NetworkCase& c) {
  try {
    return plan_from_json(read_json_file(path), c);
  } catch (const CaseFormatError& e) {
    const std::string msg = e.what();
    throw CaseFormatError(msg.rfind(path.string(), 0) == 0 ? msg : path.string() + ": " + msg);
  }
}

// ---------------------------------------------------------------------------
// Reports

struct ScheduleRow {
  std::string asset;     // "line" or "generator"
  std::string id;
  std::string location;  // bus, or from-to for lines
  int period = 0;
  double invest_cost = 0.0;  // M EUR, undiscounted
  double discounted = 0.0;   // M EUR
};

struct TraceRow {
  int iteration = 0;
  double z_lo = 0.0;
  double z_up = 0.0;
  double best_z_up = 0.0;
  double gap = 0.0;
  int new_scenarios = 0;
  double seconds = 0.0;
};

struct Report {
  std::string case_name;
  bool converged = false;
  int iterations = 0;
  double z_lo = 0.0;  // M EUR
  double z_up = 0.0;  // M EUR
  double gap = 0.0;
  InvestmentPlan plan;
  std::vector<ScheduleRow> schedule;
  double line_npc = 0.0;  // M EUR
  double gen_npc = 0.0;   // M EUR
  std::vector<PeriodBreakdown> periods;  // worst case of the incumbent
  double operation_npc = 0.0;  // M EUR
  double shedding_npc = 0.0;   // M EUR, part of operation_npc
  double total = 0.0;          // M EUR
  std::vector<TraceRow> trace;
  Json plan_json;

  [[nodiscard]] double investment_npc() const { return line_npc + gen_npc; }
};

/// Schedule, cost split and per-period worst case of a plan under the given
/// realizations (one per period).
inline Report plan_report(const NetworkCase& c, const InvestmentPlan& plan,
                          const std::vector<UncertaintyRealization>& realizations,
                          const mp::SolverBackend& backend = mp::builtin_backend()) {
  Report r;
  r.case_name = c.name;
  r.plan = plan;
  r.plan_json = plan_to_json(plan, c);
  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    if (const int t = plan.line_period(k)) {
      const auto& l = c.lines[k];
      const double cost = l.invest_cost.value_or(0.0);
      r.schedule.push_back({"line", l.id, l.from_bus + "-" + l.to_bus, t, cost,
                            discount_factor(c.planning.discount_rate, t) * cost});
    }
  }
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    if (const int t = plan.gen_period(i)) {
      const auto& g = c.generators[i];
      const double cost = g.invest_cost.value_or(0.0);
      r.schedule.push_back({"generator", g.id, g.bus, t, cost, discount_factor(c.planning.discount_rate, t) * cost});
    }
  }
  const auto ev = evaluate_plan(c, plan, realizations, backend);
  r.line_npc = ev.investment.line_npc;
  r.gen_npc = ev.investment.gen_npc;
  r.periods = ev.periods;
  r.operation_npc = ev.operation_npc;
  for (const auto& p : ev.periods) r.shedding_npc += discounted_operation(c.planning, p.period, p.shed_cost);
  r.total = ev.total;
  r.z_up = r.z_lo = ev.total;
  return r;
}

inline Report make_report(const NetworkCase& c, const CCGTrace& tr,
                          const mp::SolverBackend& backend = mp::builtin_backend()) {
  std::vector<UncertaintyRealization> worst;
  for (const auto& w : tr.best_worst_cases) worst.push_back(w.realization);
  auto r = plan_report(c, tr.best_plan, worst, backend);
  r.converged = tr.converged;
  r.iterations = tr.iteration_count();
  r.z_lo = tr.z_lo;
  r.z_up = tr.z_up;
  r.gap = tr.gap;
  for (const auto& it : tr.iterations) {
    r.trace.push_back({it.iteration, it.z_lo, it.z_up, it.best_z_up, it.gap, it.new_scenarios, it.seconds});
  }
  return r;
}

inline Json report_to_json(const Report& r) {
  Json sched = Json::array();
  for (const auto& s : r.schedule) {
    sched.push_back({{"asset", s.asset},
                     {"id", s.id},
                     {"location", s.location},
                     {"period", s.period},
                     {"invest_cost", s.invest_cost},
                     {"discounted", s.discounted}});
  }
  Json periods = Json::array();
  for (const auto& p : r.periods) {
    periods.push_back({{"period", p.period},
                       {"investment", p.investment},
                       {"c_op", p.c_op},
                       {"shed_cost", p.shed_cost},
                       {"discounted", p.discounted}});
  }
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"z_lo", t.z_lo},
                     {"z_up", t.z_up},
                     {"best_z_up", t.best_z_up},
                     {"gap", t.gap},
                     {"new_scenarios", t.new_scenarios},
                     {"seconds", t.seconds}});
  }
  return {{"case", r.case_name},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"z_lo", r.z_lo},
          {"z_up", r.z_up},
          {"gap", r.gap},
          {"investment", {{"lines", r.line_npc}, {"generators", r.gen_npc}, {"total", r.investment_npc()}}},
          {"operation_npc", r.operation_npc},
          {"shedding_npc", r.shedding_npc},
          {"total", r.total},
          {"schedule", sched},
          {"periods", periods},
          {"trace", trace},
          {"plan", r.plan_json}};
}

inline std::string schedule_csv(const Report& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "asset,id,location,period,invest_cost,discounted\n";
  double cost = 0.0;
  double disc = 0.0;
  for (const auto& s : r.schedule) {
    os << s.asset << ',' << s.id << ',' << s.location << ',' << s.period << ',' << s.invest_cost << ','
       << s.discounted << '\n';
    cost += s.invest_cost;
    disc += s.discounted;
  }
  if (!r.schedule.empty()) os << "total,,,," << cost << ',' << disc << '\n';
  return os.str();
}

inline std::string trace_csv(const Report& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "iteration,z_lo,z_up,best_z_up,gap,new_scenarios,seconds\n";
  for (const auto& t : r.trace) {
    os << t.iteration << ',' << t.z_lo << ',' << t.z_up << ',' << t.best_z_up << ',' << t.gap << ','
       << t.new_scenarios << ',' << t.seconds << '\n';
  }
  return os.str();
}

enum class ReportFormat { json, csv };

/// Paths written for a report target: the json file itself, or
/// <stem>_schedule.csv and <stem>_trace.csv next to it.
inline std::vector<std::filesystem::path> report_paths(const std::filesystem::path& path, ReportFormat fmt) {
  if (fmt == ReportFormat::json) return {path};
  auto stem = path;
  stem.replace_extension();
  return {stem.string() + "_schedule.csv", stem.string() + "_trace.csv"};
}

inline void write_report(const Report& r, const std::filesystem::path& path, ReportFormat fmt) {
  const auto paths = report_paths(path, fmt);
  if (fmt == ReportFormat::json) {
    write_text(paths[0], report_to_json(r).dump(2) + "\n");
  } else {
    write_text(paths[0], schedule_csv(r));
    write_text(paths[1], trace_csv(r));
  }
}

}  // namespace gtep
