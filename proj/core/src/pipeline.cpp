#include "junction/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "junction/verify.hpp"

namespace junction {

using nlohmann::json;

namespace {

constexpr const char* kSaturated = R"({
  "schema_version": 1,
  "name": "paper-example-saturated",
  "problem": {"builtin": "paper-example", "lambda": 1.0},
  "grid": {"xi_max": 6.0, "x0_min": -4.0, "x0_max": 4.0, "h": 0.05, "dt": 0.02},
  "solve": {"tol": 1e-6, "max_iter": 20000},
  "pipeline": ["solve", "verify", "oracle-compare", "export"],
  "oracle_compare": {"tolerance": 0.02}
})";

constexpr const char* kEntering = R"({
  "schema_version": 1,
  "name": "paper-example-entering",
  "problem": {"builtin": "paper-example", "lambda": 0.25},
  "grid": {"xi_max": 6.0, "x0_min": -4.0, "x0_max": 4.0, "h": 0.025, "dt": 0.01},
  "solve": {"tol": 1e-6, "max_iter": 40000},
  "pipeline": ["solve", "verify", "oracle-compare", "brute-force-compare", "simulate", "export"],
  "oracle_compare": {"tolerance": 0.05},
  "brute_force": {
    "points": [[1, 2.0, 1.5], [1, 2.0, 0.0], [1, 0.5, 0.5], [1, 3.0, -2.0], [1, 1.0, -0.5]],
    "segments": 2, "horizon": 40.0, "duration_step": 0.05, "duration_max": 6.0,
    "dt_int": 0.05, "tolerance": 0.05
  },
  "simulate": {
    "start": [1, 2.0, 1.5], "dt_int": 0.01,
    "schedule": [
      {"duration": 2.0, "branch": 1, "control": "a1_032"},
      {"duration": 38.0, "branch": 2, "control": "a2_000"}
    ]
  }
})";

const std::vector<std::pair<std::string, const char*>>& builtins() {
  static const std::vector<std::pair<std::string, const char*>> table{
      {"paper-example-saturated", kSaturated}, {"paper-example-entering", kEntering}};
  return table;
}

Stage parse_stage(const std::string& s) {
  if (s == "solve") return Stage::solve;
  if (s == "verify") return Stage::verify;
  if (s == "oracle-compare") return Stage::oracle_compare;
  if (s == "brute-force-compare") return Stage::brute_force_compare;
  if (s == "simulate") return Stage::simulate;
  if (s == "export") return Stage::export_field;
  throw ConfigError("unknown pipeline stage '" + s + "'");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double positive(const json& j, const char* key, double fallback, const std::string& where) {
  const double v = get_or<double>(j, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(where + "." + key + " must be a positive finite number");
  }
  return v;
}

JunctionPoint parse_point(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("points are [branch, xi, x0] triples");
  try {
    return JunctionPoint::make(j[0].get<std::size_t>(), j[1].get<double>(), j[2].get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad point: ") + e.what());
  }
}

std::vector<ControlSample> parse_controls(const json& j, std::size_t branch) {
  std::vector<ControlSample> out;
  if (j.is_object() && j.contains("disc")) {
    const auto& d = j.at("disc");
    const auto n = get_or<std::size_t>(d, "samples", 64);
    const double radius = get_or<double>(d, "radius", 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      std::ostringstream id;
      id << 'a' << branch << '_' << std::setw(3) << std::setfill('0') << k;
      out.push_back({id.str(), branch, {radius * std::cos(th), radius * std::sin(th)}});
    }
    if (get_or<bool>(d, "center", true)) {
      out.push_back({"a" + std::to_string(branch) + "_center", branch, {0.0, 0.0}});
    }
    return out;
  }
  if (!j.is_array()) throw ConfigError("controls must be a list or {\"disc\": {...}}");
  for (const auto& c : j) {
    const auto v = c.at("value").get<std::vector<double>>();
    if (v.size() != 2) throw ConfigError("control values have two components");
    out.push_back({c.at("id").get<std::string>(), branch, {v[0], v[1]}});
  }
  return out;
}

template <std::size_t N>
std::array<double, N> fixed(const json& j, const char* key, std::array<double, N> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != N) throw ConfigError(std::string(key) + " must have " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

EntryCostModel parse_entry_cost(const json& j) {
  if (j.contains("constant")) return ConstantEntryCost{j.at("constant").get<double>()};
  if (j.contains("vee")) {
    const auto& v = j.at("vee");
    return VeeEntryCost{v.at("peak").get<double>(), v.at("slope").get<double>(), v.at("floor").get<double>(),
                        get_or<double>(v, "center", 0.0)};
  }
  if (j.contains("table")) {
    const auto& t = j.at("table");
    return TabulatedEntryCost{t.at("x0").get<std::vector<double>>(), t.at("value").get<std::vector<double>>()};
  }
  throw ConfigError("entry_cost must be constant, vee or table");
}

HalfPlaneSpec parse_plane(const json& j, std::size_t branch) {
  reject_unknown(j, {"controls", "dynamics", "running_cost", "entry_cost", "bound_M", "lipschitz_L"},
                 "branch " + std::to_string(branch));
  HalfPlaneSpec p;
  p.controls = parse_controls(j.at("controls"), branch);
  if (j.contains("dynamics")) {
    const auto& d = j.at("dynamics");
    p.dynamics.gain = fixed<4>(d, "gain", p.dynamics.gain);
    const auto off = fixed<2>(d, "offset", {0.0, 0.0});
    p.dynamics.offset = {off[0], off[1]};
    p.dynamics.state_gain = fixed<4>(d, "state_gain", p.dynamics.state_gain);
  }
  if (j.contains("running_cost")) {
    const auto& c = j.at("running_cost");
    p.running_cost.base = get_or<double>(c, "base", 0.0);
    p.running_cost.control_weight = fixed<2>(c, "control_weight", {0.0, 0.0});
    p.running_cost.state_weight = fixed<2>(c, "state_weight", {0.0, 0.0});
    if (c.contains("step_at")) p.running_cost.step_at = c.at("step_at").get<double>();
    p.running_cost.step_jump = get_or<double>(c, "step_jump", 0.0);
  }
  p.entry_cost = parse_entry_cost(j.at("entry_cost"));
  p.bound_M = get_or<double>(j, "bound_M", 1.0);
  p.lipschitz_L = get_or<double>(j, "lipschitz_L", 1.0);
  return p;
}

void parse_problem(const json& j, RunConfig& cfg) {
  if (j.contains("builtin")) {
    reject_unknown(j, {"builtin", "lambda", "boundary_samples", "include_center", "entry_cost_branch1"}, "problem");
    if (j.at("builtin").get<std::string>() != "paper-example") {
      throw ConfigError("unknown built-in problem '" + j.at("builtin").get<std::string>() + "'");
    }
    const double lambda = positive(j, "lambda", 1.0, "problem");
    ExampleOptions opts;
    opts.boundary_samples = get_or<std::size_t>(j, "boundary_samples", opts.boundary_samples);
    opts.include_center = get_or<bool>(j, "include_center", opts.include_center);
    opts.entry_cost_branch1 = positive(j, "entry_cost_branch1", opts.entry_cost_branch1, "problem");
    cfg.problem.emplace(oracle_example_spec(lambda, opts));
    cfg.example = ExampleRegime::from_lambda(lambda);
    return;
  }
  reject_unknown(j, {"lambda", "tangency_eps", "controllability", "branches"}, "problem");
  const auto& branches = j.at("branches");
  if (!branches.is_array()) throw ConfigError("problem.branches must be a list");
  std::vector<HalfPlaneSpec> planes;
  for (std::size_t b = 0; b < branches.size(); ++b) planes.push_back(parse_plane(branches[b], b + 1));
  auto mode = ControllabilityMode::strong;
  double delta = 0.5;
  if (j.contains("controllability")) {
    const auto& c = j.at("controllability");
    const auto m = get_or<std::string>(c, "mode", "strong");
    if (m == "moderate") {
      mode = ControllabilityMode::moderate;
    } else if (m != "strong") {
      throw ConfigError("controllability.mode must be strong or moderate");
    }
    delta = positive(c, "delta", delta, "problem.controllability");
  }
  cfg.problem.emplace(JunctionGeometry(planes.size()), std::move(planes), positive(j, "lambda", 1.0, "problem"),
                      positive(j, "tangency_eps", 1e-9, "problem"), mode, delta);
}

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::solve: return "solve";
    case Stage::verify: return "verify";
    case Stage::oracle_compare: return "oracle-compare";
    case Stage::brute_force_compare: return "brute-force-compare";
    case Stage::simulate: return "simulate";
    case Stage::export_field: return "export";
  }
  return "unknown";
}

void validate_pipeline(const std::vector<Stage>& stages) {
  bool solved = false;
  for (Stage s : stages) {
    if (s == Stage::solve) {
      solved = true;
    } else if (s != Stage::simulate && !solved) {
      throw ConfigError(std::string("stage '") + to_string(s) + "' needs 'solve' earlier in the pipeline");
    }
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  try {
    const json j = json::parse(text);
    reject_unknown(j, {"schema_version", "name", "problem", "grid", "solve", "pipeline", "verify",
                       "oracle_compare", "brute_force", "simulate"},
                   "configuration");
    const int version = j.at("schema_version").get<int>();
    if (version != kConfigSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(version));
    }
    cfg.name = get_or<std::string>(j, "name", "run");
    parse_problem(j.at("problem"), cfg);

    const auto& g = j.at("grid");
    reject_unknown(g, {"xi_max", "x0_min", "x0_max", "h", "dt"}, "grid");
    cfg.grid.xi_max = positive(g, "xi_max", cfg.grid.xi_max, "grid");
    cfg.grid.x0_min = get_or<double>(g, "x0_min", cfg.grid.x0_min);
    cfg.grid.x0_max = get_or<double>(g, "x0_max", cfg.grid.x0_max);
    cfg.grid.h = positive(g, "h", cfg.grid.h, "grid");
    cfg.grid.dt = positive(g, "dt", cfg.grid.dt, "grid");
    try {
      cfg.grid.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    if (j.contains("solve")) {
      const auto& s = j.at("solve");
      reject_unknown(s, {"tol", "max_iter"}, "solve");
      cfg.tol = positive(s, "tol", cfg.tol, "solve");
      cfg.max_iter = get_or<std::size_t>(s, "max_iter", cfg.max_iter);
      if (cfg.max_iter == 0) throw ConfigError("solve.max_iter must be positive");
    }
    for (const auto& s : j.at("pipeline")) cfg.pipeline.push_back(parse_stage(s.get<std::string>()));
    validate_pipeline(cfg.pipeline);

    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      reject_unknown(v, {"kink_curvature", "max_interior_residual", "lipschitz_band"}, "verify");
      cfg.verify.kink_curvature = positive(v, "kink_curvature", cfg.verify.kink_curvature, "verify");
      if (v.contains("max_interior_residual")) {
        cfg.verify.max_interior_residual = positive(v, "max_interior_residual", 1.0, "verify");
      }
      cfg.verify.lipschitz_band = positive(v, "lipschitz_band", cfg.verify.lipschitz_band, "verify");
    }
    if (j.contains("oracle_compare")) {
      const auto& o = j.at("oracle_compare");
      reject_unknown(o, {"tolerance", "points"}, "oracle_compare");
      cfg.oracle.tolerance = positive(o, "tolerance", cfg.oracle.tolerance, "oracle_compare");
      if (o.contains("points")) {
        for (const auto& p : o.at("points")) cfg.oracle.points.push_back(parse_point(p));
      }
    }
    if (j.contains("brute_force")) {
      const auto& b = j.at("brute_force");
      reject_unknown(b, {"points", "segments", "horizon", "duration_step", "duration_max", "dt_int", "tolerance"},
                     "brute_force");
      BruteForceStageConfig bf;
      for (const auto& p : b.at("points")) bf.points.push_back(parse_point(p));
      bf.segments = get_or<std::size_t>(b, "segments", bf.segments);
      if (bf.segments == 0) throw ConfigError("brute_force.segments must be positive");
      bf.horizon = positive(b, "horizon", bf.horizon, "brute_force");
      bf.duration_step = positive(b, "duration_step", bf.duration_step, "brute_force");
      bf.duration_max = positive(b, "duration_max", bf.duration_max, "brute_force");
      bf.dt_int = positive(b, "dt_int", bf.dt_int, "brute_force");
      bf.tolerance = positive(b, "tolerance", bf.tolerance, "brute_force");
      cfg.brute_force = bf;
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      reject_unknown(s, {"start", "dt_int", "schedule", "policy_horizon"}, "simulate");
      SimulateStageConfig sim;
      sim.start = parse_point(s.at("start"));
      sim.dt_int = positive(s, "dt_int", sim.dt_int, "simulate");
      sim.policy_horizon = positive(s, "policy_horizon", sim.policy_horizon, "simulate");
      if (s.contains("schedule")) {
        for (const auto& seg : s.at("schedule")) {
          sim.schedule.push_back({seg.at("duration").get<double>(), seg.at("branch").get<std::size_t>(),
                                  seg.at("control").get<std::string>()});
        }
      }
      cfg.simulate = sim;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  const auto needs = [&](Stage s) {
    return std::find(cfg.pipeline.begin(), cfg.pipeline.end(), s) != cfg.pipeline.end();
  };
  if ((needs(Stage::oracle_compare) || needs(Stage::brute_force_compare)) && !cfg.example) {
    throw ConfigError("oracle and brute-force comparisons need the built-in paper-example problem");
  }
  if (needs(Stage::brute_force_compare) && !cfg.brute_force) {
    throw ConfigError("brute-force-compare stage without a brute_force section");
  }
  if (needs(Stage::simulate)) {
    if (!cfg.simulate) throw ConfigError("simulate stage without a simulate section");
    if (cfg.simulate->schedule.empty()) {
      const auto solve_at = std::find(cfg.pipeline.begin(), cfg.pipeline.end(), Stage::solve);
      const auto sim_at = std::find(cfg.pipeline.begin(), cfg.pipeline.end(), Stage::simulate);
      if (solve_at > sim_at) throw ConfigError("policy rollout needs 'solve' before 'simulate'");
    }
  }
  return cfg;
}

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtins()) out.push_back(name);
  return out;
}

std::string builtin_config_text(const std::string& name) {
  for (const auto& [n, text] : builtins()) {
    if (n == name) return text;
  }
  throw ConfigError("unknown built-in configuration '" + name + "'");
}

RunConfig load_config(const std::string& source) {
  for (const auto& [n, text] : builtins()) {
    if (n == source) return parse_config(text);
  }
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot read configuration '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<JunctionPoint> default_oracle_lattice(const GridSpec& grid, std::size_t n_branches) {
  constexpr double margin = 1.5;
  constexpr std::size_t n = 21;
  const double xi_hi = grid.xi_max - margin;
  const double lo = grid.x0_min + margin;
  const double hi = grid.x0_max - margin;
  std::vector<JunctionPoint> out;
  if (!(xi_hi > 0.0) || !(hi >= lo)) return out;
  for (std::size_t b = 1; b <= n_branches; ++b) {
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = xi_hi * static_cast<double>(k + 1) / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double x0 = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
        if (std::abs(std::abs(x0) - 1.0) < 2.0 * grid.h) continue;
        out.push_back(JunctionPoint::make(b, xi, x0));
      }
    }
  }
  return out;
}

OracleComparison compare_to_oracle(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                                   const ExampleRegime& regime, const std::vector<JunctionPoint>& points) {
  if (spec.n_branches() != 2 || std::abs(spec.lambda() - regime.lambda) > 1e-15 ||
      ExampleRegime::from_lambda(spec.lambda()).regime != regime.regime) {
    throw std::invalid_argument("problem does not match the benchmark regime");
  }
  OracleComparison out;
  double sum = 0.0;
  for (const auto& p : points) {
    const double s = interpolate(grid, field, p);
    const double o = p.on_gamma() ? oracle_interface_value(regime, p.x0) : oracle_value(regime, p);
    const double e = std::abs(s - o);
    out.rows.push_back({p, s, o, e});
    out.max_error = std::max(out.max_error, e);
    sum += e;
  }
  if (!out.rows.empty()) out.mean_error = sum / static_cast<double>(out.rows.size());
  return out;
}

void write_value_field_csv(std::ostream& os, const GridSpec& grid, const ValueField& field) {
  const auto old = os.precision(17);
  os << "branch,xi,x0,value\n";
  for (std::size_t b = 1; b <= field.n_branches(); ++b) {
    for (std::size_t k = 0; k <= field.nx(); ++k) {
      for (std::size_t j = 0; j <= field.ny(); ++j) {
        os << b << ',' << grid.xi(k) << ',' << grid.x0(j) << ',' << field.v(b, k, j) << '\n';
      }
    }
  }
  const auto u = field.gamma();
  for (std::size_t j = 0; j < u.size(); ++j) os << "0,0," << grid.x0(j) << ',' << u[j] << '\n';
  os.precision(old);
}

namespace {

json point_json(const JunctionPoint& p) { return json::array({p.branch, p.xi, p.x0}); }

std::vector<ControlRef> all_controls(const ProblemSpec& spec) {
  std::vector<ControlRef> out;
  for (std::size_t b = 1; b <= spec.n_branches(); ++b) {
    for (std::size_t k = 0; k < spec.plane(b).controls.size(); ++k) out.push_back({b, k});
  }
  return out;
}

// For the benchmark, branch-2 controls other than the free exit only add
// enumeration cost.
std::vector<ControlRef> brute_force_candidates(const ProblemSpec& spec, bool example) {
  if (!example) return all_controls(spec);
  std::vector<ControlRef> out;
  for (std::size_t k = 0; k < spec.plane(1).controls.size(); ++k) out.push_back({1, k});
  out.push_back(find_control(spec, 2, "a2_000"));
  return out;
}

}  // namespace

RunOutcome run(const RunConfig& config, const RunOptions& options) {
  const auto stages = options.stages.value_or(config.pipeline);
  validate_pipeline(stages);
  const ProblemSpec& spec = *config.problem;
  const GridSpec& grid = config.grid;
  std::filesystem::create_directories(options.out_dir);

  RunOutcome outcome;
  json summary;
  summary["schema_version"] = kConfigSchemaVersion;
  summary["name"] = config.name;
  summary["stages"] = json::array();
  auto check = [&](std::string name, bool passed, std::string detail) {
    outcome.checks.push_back({std::move(name), passed, std::move(detail)});
  };
  const SolverOptions solver_options{options.threads};

  for (Stage stage : stages) {
    summary["stages"].push_back(to_string(stage));
    switch (stage) {
      case Stage::solve: {
        outcome.solution = solve(spec, grid, config.tol, config.max_iter, solver_options);
        const auto& r = outcome.solution->report;
        summary["solve"] = {{"iterations", r.iterations},
                            {"converged", r.converged},
                            {"final_change", r.final_change},
                            {"final_residual", r.final_residual},
                            {"contraction_ratio", r.contraction_ratio},
                            {"theoretical_ratio", r.theoretical_ratio},
                            {"history_monotone", r.history_monotone},
                            {"iterates_decreasing", r.iterates_decreasing},
                            {"bound_respected", r.bound_respected},
                            {"warnings", r.warnings},
                            {"wall_seconds", r.wall_seconds}};
        check("solve.converged", r.converged,
              "final sweep change " + std::to_string(r.final_change) + " after " +
                  std::to_string(r.iterations) + " sweeps");
        break;
      }
      case Stage::verify: {
        const auto& field = outcome.solution->field;
        const auto sw = check_sandwich(spec, grid, field, config.tol);
        const auto cr = check_controllability_regime(spec, grid);
        const auto vr = check_viscosity_residual_interior(spec, grid, field, config.verify.kink_curvature);
        const double lip = interface_lipschitz_quotient(grid, field, config.verify.lipschitz_band);
        summary["verify"] = {
            {"sandwich", {{"allowed_slack", sw.allowed_slack},
                          {"worst_lower_excess", sw.worst_lower_excess},
                          {"worst_upper_excess", sw.worst_upper_excess},
                          {"violations", sw.violations.size()}}},
            {"controllability", {{"delta", cr.delta},
                                 {"classification", to_string(cr.classification)},
                                 {"guarantees_hold", cr.guarantees_hold()}}},
            {"interior_residual", {{"max_abs", vr.max_abs},
                                   {"mean_abs", vr.mean_abs},
                                   {"nodes_checked", vr.nodes_checked},
                                   {"nodes_excluded", vr.nodes_excluded},
                                   {"worst", json::array({vr.worst_branch, vr.worst_xi, vr.worst_x0})}}},
            {"interface_lipschitz_quotient", lip}};
        check("verify.sandwich", sw.ok(), std::to_string(sw.violations.size()) + " violations");
        check("verify.controllability", cr.guarantees_hold(), to_string(cr.classification));
        if (config.verify.max_interior_residual) {
          check("verify.interior_residual", vr.max_abs <= *config.verify.max_interior_residual,
                "max |residual| " + std::to_string(vr.max_abs));
        }
        break;
      }
      case Stage::oracle_compare: {
        const auto points =
            config.oracle.points.empty() ? default_oracle_lattice(grid) : config.oracle.points;
        const auto cmp = compare_to_oracle(spec, grid, outcome.solution->field, *config.example, points);
        json rows = json::array();
        for (const auto& r : cmp.rows) rows.push_back({point_json(r.point), r.solver, r.oracle, r.error});
        summary["oracle_compare"] = {{"tolerance", config.oracle.tolerance},
                                     {"max_error", cmp.max_error},
                                     {"mean_error", cmp.mean_error},
                                     {"table", rows}};
        check("oracle_compare.max_error", cmp.max_error <= config.oracle.tolerance,
              std::to_string(cmp.max_error) + " vs tolerance " + std::to_string(config.oracle.tolerance));
        break;
      }
      case Stage::brute_force_compare: {
        const auto& bf = *config.brute_force;
        BruteForceOptions opts;
        opts.horizon = bf.horizon;
        opts.segments = bf.segments;
        opts.dt_int = bf.dt_int;
        opts.threads = options.threads;
        for (double d = bf.duration_step; d <= bf.duration_max + 1e-12; d += bf.duration_step) {
          opts.duration_mesh.push_back(d);
        }
        // The seed only reorders the mesh; the minimum is order independent.
        std::shuffle(opts.duration_mesh.begin(), opts.duration_mesh.end(), std::mt19937_64(options.seed));
        const auto candidates = brute_force_candidates(spec, config.example.has_value());
        json rows = json::array();
        bool all_ok = true;
        for (const auto& p : bf.points) {
          const auto res = brute_force_value(spec, p, candidates, opts);
          const double oracle = oracle_value(*config.example, p);
          const double solver = interpolate(grid, outcome.solution->field, p);
          const bool ok = std::abs(res.value - oracle) <= bf.tolerance && res.value >= solver - bf.tolerance;
          all_ok = all_ok && ok;
          rows.push_back({{"point", point_json(p)},
                          {"brute_force", res.value},
                          {"tail_bound", res.tail_bound},
                          {"oracle", oracle},
                          {"solver", solver},
                          {"schedules", res.evaluated},
                          {"passed", ok}});
        }
        summary["brute_force_compare"] = {{"tolerance", bf.tolerance}, {"points", rows}};
        check("brute_force_compare", all_ok, std::to_string(bf.points.size()) + " points");
        break;
      }
      case Stage::simulate: {
        const auto& sim = *config.simulate;
        Trajectory traj;
        json detail;
        if (sim.schedule.empty()) {
          auto d = dpp_residual(spec, grid, outcome.solution->field, sim.start, sim.policy_horizon);
          detail = {{"mode", "policy"}, {"dpp_residual", d.residual}, {"cost", d.running_and_entry}};
          traj = std::move(d.trajectory);
        } else {
          ControlSchedule schedule;
          for (const auto& s : sim.schedule) {
            schedule.segments.push_back({s.duration, s.branch, find_control(spec, s.branch, s.control).control});
          }
          traj = simulate(spec, sim.start, schedule, sim.dt_int);
          const auto c = cost(spec, traj);
          detail = {{"mode", "schedule"},
                    {"running", c.running},
                    {"entry", c.entry},
                    {"total", c.total()},
                    {"tail_bound", c.tail_bound}};
        }
        detail["entry_events"] = traj.entry_events.size();
        detail["exit_events"] = traj.exit_events.size();
        summary["simulate"] = detail;
        std::ofstream csv(options.out_dir / "trajectory.csv");
        write_trajectory_csv(csv, traj);
        check("simulate.events", events_consistent(traj), "entry/exit events alternate");
        break;
      }
      case Stage::export_field: {
        std::ofstream csv(options.out_dir / "value_field.csv");
        write_value_field_csv(csv, grid, outcome.solution->field);
        break;
      }
    }
  }

  json checks = json::array();
  bool all = true;
  for (const auto& c : outcome.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    all = all && c.passed;
  }
  summary["checks"] = checks;
  summary["passed"] = all;
  outcome.exit_code = all ? 0 : 1;
  outcome.summary_path = options.out_dir / "summary.json";
  std::ofstream(outcome.summary_path) << std::setw(2) << summary << '\n';
  return outcome;
}

int run(const std::string& source, const RunOptions& options, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(source);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 2;
  }
  try {
    const auto outcome = run(cfg, options);
    for (const auto& c : outcome.checks) {
      log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    log << "summary written to " << outcome.summary_path.string() << '\n';
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "stage failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace junction
