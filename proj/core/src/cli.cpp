#include "phonon_forge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "phonon_forge/error.hpp"
#include "phonon_forge/experiments.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/laguerre.hpp"
#include "phonon_forge/result_table.hpp"

#ifndef PHONON_FORGE_VERSION
#define PHONON_FORGE_VERSION "unknown"
#endif

namespace phonon_forge::cli {

std::string to_string(Command c) {
  switch (c) {
    case Command::steady: return "steady";
    case Command::evolve: return "evolve";
    case Command::sweep: return "sweep";
    case Command::calibrate: return "calibrate";
    case Command::validate: return "validate";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (const Command c : {Command::steady, Command::evolve, Command::sweep, Command::calibrate, Command::validate})
    if (to_string(c) == s) return c;
  fail(ErrorCode::config, "unknown command '" + s + "' (expected steady, evolve, sweep, calibrate or validate)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void type_error(const std::string& key, const std::string& expected, const std::string& value) {
  fail(ErrorCode::config, "key '" + key + "' expects " + expected + ", got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    type_error(key, "a real number", v);
  }
  if (used != v.size() || !std::isfinite(x)) type_error(key, "a real number", v);
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    type_error(key, "an integer", v);
  }
  if (used != v.size()) type_error(key, "an integer", v);
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < -1'000'000'000LL || x > 1'000'000'000LL) type_error(key, "an integer", v);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  type_error(key, "a boolean (true/false)", v);
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) type_error(key, "a comma-separated list of reals", v);
  return out;
}

/// "x" applies to both cells, "x,y" sets them separately.
std::array<double, 2> parse_pair(const std::string& key, const std::string& v) {
  const auto xs = parse_reals(key, v);
  if (xs.size() == 1) return {xs[0], xs[0]};
  if (xs.size() == 2) return {xs[0], xs[1]};
  type_error(key, "one or two comma-separated reals", v);
}

std::pair<int, int> parse_target(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 2) type_error(key, "a target pair 'M1,M2'", v);
  return {parse_int(key, parts[0]), parse_int(key, parts[1])};
}

struct KeySpec {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;

  std::string qualified() const { return section + "." + name; }
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> k;
    auto add = [&](std::string section, std::string name, auto fn) {
      k.push_back({std::move(section), std::move(name), fn});
    };
    add("run", "command", [](RunConfig& c, auto&, auto& v) { c.command = command_from_string(v); });

    add("model", "omega_m", [](RunConfig& c, auto& k, auto& v) { c.params.omega_m = parse_real(k, v); });
    add("model", "theta", [](RunConfig& c, auto& k, auto& v) { c.params.theta = parse_real(k, v); });
    add("model", "targets", [](RunConfig& c, auto& k, auto& v) {
      const auto t = parse_target(k, v);
      c.params.targets = {t.first, t.second};
    });
    add("model", "chi_bar", [](RunConfig& c, auto& k, auto& v) { c.params.chi_bar = parse_real(k, v); });
    add("model", "kappa", [](RunConfig& c, auto& k, auto& v) { c.params.kappa = parse_pair(k, v); });
    add("model", "gamma", [](RunConfig& c, auto& k, auto& v) { c.params.gamma = parse_pair(k, v); });
    add("model", "nbar", [](RunConfig& c, auto& k, auto& v) { c.params.nbar = parse_pair(k, v); });
    add("model", "scenario", [](RunConfig& c, auto&, auto& v) { c.params.scenario = scenario_from_string(v); });
    add("model", "d_m", [](RunConfig& c, auto& k, auto& v) { c.params.d_m = parse_int(k, v); });
    add("model", "d_c", [](RunConfig& c, auto& k, auto& v) { c.params.d_c = parse_int(k, v); });
    add("model", "eta_free", [](RunConfig& c, auto& k, auto& v) { c.params.eta_free = parse_real(k, v); });
    add("model", "omega_drive",
        [](RunConfig& c, auto& k, auto& v) { c.params.omega_drive_override = parse_pair(k, v); });

    add("solver", "method", [](RunConfig& c, auto&, auto& v) {
      if (v == "auto") {
        c.method.reset();
      } else {
        c.method = steady_method_from_string(v);
      }
    });
    add("solver", "tol", [](RunConfig& c, auto& k, auto& v) { c.tol = parse_real(k, v); });
    add("solver", "t_final", [](RunConfig& c, auto& k, auto& v) { c.t_final = parse_real(k, v); });
    add("solver", "dt_out", [](RunConfig& c, auto& k, auto& v) { c.dt_out = parse_real(k, v); });
    add("solver", "gamma_over_kappa",
        [](RunConfig& c, auto& k, auto& v) { c.gamma_over_kappa = parse_real(k, v); });
    add("solver", "parallelism", [](RunConfig& c, auto& k, auto& v) { c.parallelism = parse_int(k, v); });
    add("solver", "seed", [](RunConfig& c, auto& k, auto& v) { c.seed = parse_integer(k, v); });
    add("solver", "audit_truncation",
        [](RunConfig& c, auto& k, auto& v) { c.audit_truncation = parse_bool(k, v); });

    add("output", "dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; });
    add("output", "log_base", [](RunConfig& c, auto& k, auto& v) {
      if (v == "e" || v == "natural") {
        c.log_base = LogBase::natural;
      } else if (v == "2") {
        c.log_base = LogBase::two;
      } else {
        type_error(k, "'e' or '2'", v);
      }
    });

    add("sweep", "preset", [](RunConfig& c, auto&, auto& v) { c.preset = v; });
    add("sweep", "m_max", [](RunConfig& c, auto& k, auto& v) { c.m_max = parse_int(k, v); });
    add("sweep", "large", [](RunConfig& c, auto& k, auto& v) { c.large = parse_bool(k, v); });
    add("sweep", "theta_grid", [](RunConfig& c, auto& k, auto& v) { c.theta_grid = parse_reals(k, v); });
    add("sweep", "gamma_over_kappa_grid",
        [](RunConfig& c, auto& k, auto& v) { c.gamma_over_kappa_grid = parse_reals(k, v); });
    add("sweep", "targets", [](RunConfig& c, auto& k, auto& v) {
      c.targets.clear();
      for (const auto& t : split(v, ';')) c.targets.push_back(parse_target(k, t));
    });
    add("sweep", "nbar", [](RunConfig& c, auto& k, auto& v) { c.sweep_nbar = parse_real(k, v); });
    return k;
  }();
  return specs;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

[[noreturn]] void unknown_key(const std::string& key) {
  fail(ErrorCode::config, "unknown key '" + key + "'; did you mean '" + nearest_key(key) + "'?");
}

/// Resolves "name" (unique across sections) or "section.name".
const KeySpec& resolve(const std::string& section, const std::string& key) {
  std::string sec = section;
  std::string name = key;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    sec = key.substr(0, dot);
    name = key.substr(dot + 1);
  }
  std::replace(name.begin(), name.end(), '-', '_');
  const KeySpec* hit = nullptr;
  for (const auto& s : key_specs()) {
    if (s.name != name || (!sec.empty() && s.section != sec)) continue;
    hit = &s;
    break;
  }
  if (!hit) unknown_key(sec.empty() ? key : sec + "." + name);
  return *hit;
}

void apply(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  const KeySpec& spec = resolve(section, key);
  spec.set(c, spec.qualified(), value);
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& s : key_specs()) out.push_back(s.qualified());
  return out;
}

std::string nearest_key(const std::string& key) {
  const auto dot = key.find('.');
  const std::string bare = dot == std::string::npos ? key : key.substr(dot + 1);
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& s : key_specs()) {
    const std::size_t d = std::min(edit_distance(bare, s.name), edit_distance(key, s.qualified()));
    if (d < best_d) {
      best_d = d;
      best = s.qualified();
    }
  }
  return best;
}

RunConfig parse_config_text(const std::string& text, const Overrides& overrides) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::config, "line " + std::to_string(line_no) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> sections{"run", "model", "solver", "output", "sweep"};
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        fail(ErrorCode::config, "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply(c, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& [k, v] : overrides) apply(c, "", k, v);
  return c;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file, const Overrides& overrides) {
  std::string text;
  if (file) {
    std::ifstream is(*file);
    if (!is) fail(ErrorCode::io, "cannot read config file '" + file->string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"command", to_string(command)},
                      {"params", phonon_forge::to_json(params)},
                      {"output_dir", output_dir.string()},
                      {"parallelism", parallelism},
                      {"seed", seed},
                      {"method", method ? phonon_forge::to_string(*method) : "auto"},
                      {"tol", tol},
                      {"t_final", t_final},
                      {"dt_out", dt_out},
                      {"m_max", m_max},
                      {"large", large},
                      {"theta_grid", theta_grid},
                      {"gamma_over_kappa_grid", gamma_over_kappa_grid},
                      {"sweep_nbar", sweep_nbar},
                      {"log_base", log_base == LogBase::two ? "2" : "e"},
                      {"audit_truncation", audit_truncation}};
  if (preset) j["preset"] = *preset;
  if (gamma_over_kappa >= 0.0) j["gamma_over_kappa"] = gamma_over_kappa;
  nlohmann::json t = nlohmann::json::array();
  for (const auto& [a, b] : targets) t.push_back({a, b});
  j["targets"] = t;
  return j;
}

namespace {

ModelParams effective_params(const RunConfig& c) {
  ModelParams p = c.params;
  if (c.gamma_over_kappa >= 0.0) {
    for (int n = 0; n < 2; ++n) p.gamma[n] = c.gamma_over_kappa * p.kappa[n];
  }
  return calibrate(p);
}

SteadyOptions steady_options(const RunConfig& c) {
  SteadyOptions o;
  o.tol = c.tol;
  if (c.method) o.method = *c.method;
  return o;
}

int resolved_parallelism(const RunConfig& c) { return c.parallelism > 0 ? c.parallelism : default_parallelism(); }

PresetOptions preset_options(const RunConfig& c) {
  PresetOptions o;
  o.base = c.params;
  o.parallelism = resolved_parallelism(c);
  o.steady = steady_options(c);
  o.log_base = c.log_base;
  o.audit_truncation = c.audit_truncation;
  return o;
}

void write_table(const ResultTable& t, const RunConfig& c, std::ostream& out) {
  ResultTable copy = t;
  copy.meta["config"] = c.to_json();
  const auto csv = c.output_dir / (t.name() + ".csv");
  const auto json = c.output_dir / (t.name() + ".json");
  copy.write_csv(csv);
  copy.write_metadata(json);
  std::size_t bad = 0;
  if (t.has_column("status")) {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t.text(i, "status") != "ok") ++bad;
  }
  out << "wrote " << csv.string() << " (" << t.size() << " rows";
  if (bad) out << ", " << bad << " not ok";
  out << ") and " << json.string() << '\n';
}

int run_calibrate(const RunConfig& c, std::ostream& out) {
  const ModelParams p = effective_params(c);
  out << "targets       " << p.targets[0] << ", " << p.targets[1] << '\n';
  for (int n = 0; n < 2; ++n) {
    const std::string i = std::to_string(n + 1);
    out << "eta" << i << "          " << format_number(p.eta[n]) << '\n';
    out << "Omega" << i << "        " << format_number(p.omega_drive[n]) << '\n';
    out << "Delta" << i << "        " << format_number(p.delta[n]) << '\n';
  }
  out << "d_m           " << p.phonon_dim() << '\n';
  for (int n = 0; n < 2; ++n) {
    const std::string i = std::to_string(n + 1);
    const double g_eta = p.g(n) * p.eta[n];
    out << "check weak drive  Omega" << i << " = " << format_number(p.omega_drive[n]) << " < 0.1 omega_m: pass\n";
    out << "check blockade    kappa" << i << " = " << format_number(p.kappa[n]) << " < g eta = "
        << format_number(g_eta) << ": pass" << (p.kappa[n] >= 0.1 * g_eta ? " (margin < 10x)" : "") << '\n';
    out << "check sideband    kappa" << i << " < 0.1 omega_m: "
        << (p.kappa[n] < 0.1 * p.omega_m ? "pass" : "warn") << '\n';
  }
  out << "check truncation  d_m = " << p.phonon_dim() << " >= max(M) + 3: pass\n";
  for (const auto& w : p.warnings) out << "warning: " << w << '\n';
  nlohmann::json j = {{"params", to_json(p)}, {"config", c.to_json()}};
  std::filesystem::create_directories(c.output_dir);
  std::ofstream os(c.output_dir / "calibrate.json");
  if (!os) fail(ErrorCode::io, "cannot write calibrate.json in '" + c.output_dir.string() + "'");
  os << j.dump(2) << '\n';
  return exit_ok;
}

MechanicalSolution solve_with_config(const RunConfig& c, const ModelParams& p) {
  if (!c.method) return solve_mechanical_steady(p, steady_options(c));
  const ModeLayout layout = effective_layout(p);
  const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, layout), build_dissipators(p, layout));
  SteadyOptions o = steady_options(c);
  o.first_checkpoint = 10.0 / std::max(p.kappa[0], p.kappa[1]);
  const SteadyState ss = steady_state(L, initial_state(p, layout), o);
  MechanicalSolution s;
  s.rho = partial_trace(ss.rho, {"B1", "B2"});
  s.residual = ss.residual;
  s.method = ss.method_used;
  s.converged = true;
  return s;
}

int run_steady(const RunConfig& c, std::ostream& out) {
  const ModelParams p = effective_params(c);
  const MechanicalSolution s = solve_with_config(c, p);
  if (!s.rho) fail(ErrorCode::non_convergence, s.error);
  const PointMeasures m = measure_mechanical(*s.rho, p.theta, true, c.log_base);
  ResultTable t("steady", {{"M1", "1"},
                           {"M2", "1"},
                           {"theta", "rad"},
                           {"scenario", "1"},
                           {"N_inf", "1"},
                           {"P_inf", "1"},
                           {"WLN", "1"},
                           {"residual", "1"},
                           {"method", "1"}});
  t.add_row({std::int64_t{p.targets[0]}, std::int64_t{p.targets[1]}, p.theta, to_string(p.scenario), m.negativity,
             m.purity, m.wln, s.residual, to_string(s.method)});
  t.meta = {{"params", to_json(p)}, {"code_version", PHONON_FORGE_VERSION}, {"units", "omega_m = 1"}};
  write_table(t, c, out);
  out << "N_inf " << format_number(m.negativity) << "  P_inf " << format_number(m.purity) << "  WLN "
      << format_number(m.wln) << "  residual " << format_number(s.residual) << '\n';
  return exit_ok;
}

int run_evolve(const RunConfig& c, std::ostream& out) {
  const ModelParams p = effective_params(c);
  const ModeLayout layout = effective_layout(p);
  const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, layout), build_dissipators(p, layout));
  EvolveOptions eo;
  eo.tol = c.tol;
  const Trajectory traj = evolve(initial_state(p, layout), L, c.t_final, c.dt_out, eo);
  ResultTable t("evolve", {{"t", "omega_m^-1"},
                           {"N_t", "1"},
                           {"P_t", "1"},
                           {"residual", "1"},
                           {"trace_error", "1"},
                           {"hermiticity_defect", "1"}});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const DensityMatrix rho_B = partial_trace(traj.states[k], {"B1", "B2"});
    const PointMeasures m = measure_mechanical(rho_B, p.theta, false);
    t.add_row({traj.times[k], m.negativity, m.purity, traj.residuals[k], traj.trace_errors[k],
               traj.hermiticity_defects[k]});
  }
  t.meta = {{"params", to_json(p)},
            {"code_version", PHONON_FORGE_VERSION},
            {"units", "omega_m = 1"},
            {"steps", traj.steps},
            {"initial_state", "vacuum"}};
  write_table(t, c, out);
  Checkpoint cp{layout, traj.times.back(), vec(traj.states.back().matrix())};
  write_checkpoint(c.output_dir / "evolve_final.pfck", cp);
  return exit_ok;
}

std::vector<Target> targets_or(const RunConfig& c, std::vector<Target> fallback) {
  return c.targets.empty() ? fallback : c.targets;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
  if (!c.preset) fail(ErrorCode::config, "sweep needs a preset (fig2a, fig2b, fig3, fig4, fig5, fig6)");
  const std::string& name = *c.preset;
  const PresetOptions o = preset_options(c);
  const std::vector<double> grid = c.theta_grid.empty() ? default_theta_grid() : c.theta_grid;
  if (name == "fig2a") {
    ResultTable t = run_fig2a(c.large ? 8 : c.m_max, c.params.theta, o);
    const TmsReport r = compare_tms_bound(t);
    t.meta["tms_bound"] = r.bound;
    t.meta["tms_exceeding_rows"] = r.exceeding.size();
    write_table(t, c, out);
  } else if (name == "fig2b") {
    std::vector<Target> fallback{{1, 1}, {3, 3}, {5, 5}, {3, 5}};
    if (c.large) fallback.insert(fallback.end(), {{8, 8}, {9, 9}, {10, 10}});
    ResultTable t = run_fig2b(targets_or(c, fallback), grid, o);
    const TmsReport r = compare_tms_bound(t);
    t.meta["tms_bound"] = r.bound;
    t.meta["tms_exceeding_rows"] = r.exceeding.size();
    t.meta["tms_covers_high_m"] = r.covers_high_m;
    write_table(t, c, out);
    out << "rows above 2^ln2 = " << format_number(r.bound) << ": " << r.exceeding.size() << '\n';
  } else if (name == "fig3") {
    const auto gk = c.gamma_over_kappa_grid.empty() ? std::vector<double>{1e-4, 1e-3, 1e-2, 1e-1}
                                                    : c.gamma_over_kappa_grid;
    write_table(run_fig3(targets_or(c, {{5, 5}}).front(), gk, o), c, out);
  } else if (name == "fig4") {
    const auto gk = c.gamma_over_kappa_grid.empty() ? std::vector<double>{1e-5, 1e-4, 1e-3}
                                                    : c.gamma_over_kappa_grid;
    write_table(run_fig4(targets_or(c, {{5, 5}}).front(), c.sweep_nbar, gk, c.t_final, o), c, out);
  } else if (name == "fig5") {
    write_table(run_fig5(targets_or(c, {{1, 1}, {3, 3}, {5, 5}}), grid, o), c, out);
  } else if (name == "fig6") {
    write_table(run_fig6(c.m_max), c, out);
  } else {
    fail(ErrorCode::config, "unknown preset '" + name + "' (expected fig2a, fig2b, fig3, fig4, fig5 or fig6)");
  }
  return exit_ok;
}

int run_validate(std::ostream& out) {
  int failed = 0;
  for (const auto& check : run_validation_suite()) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name << "  " << check.detail << '\n';
    if (!check.passed) ++failed;
  }
  out << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << '\n';
  return failed ? exit_failure : exit_ok;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::validation:
    case ErrorCode::calibration:
    case ErrorCode::unknown_label:
    case ErrorCode::constraint_violation:
    case ErrorCode::no_root:
      return exit_config;
    case ErrorCode::non_convergence:
    case ErrorCode::stiffness:
    case ErrorCode::grid_too_small:
      return exit_solver;
    case ErrorCode::io:
      return exit_io;
    default:
      return exit_failure;
  }
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command != Command::validate) {
      std::error_code ec;
      std::filesystem::create_directories(config.output_dir, ec);
      if (ec) fail(ErrorCode::io, "output directory '" + config.output_dir.string() + "': " + ec.message());
    }
    switch (config.command) {
      case Command::calibrate: return run_calibrate(config, out);
      case Command::steady: return run_steady(config, out);
      case Command::evolve: return run_evolve(config, out);
      case Command::sweep: return run_sweep(config, out);
      case Command::validate: return run_validate(out);
    }
    return exit_failure;
  } catch (const Error& e) {
    err << nlohmann::json{{"error", {{"code", std::string(phonon_forge::to_string(e.code()))},
                                     {"message", e.what()},
                                     {"command", to_string(config.command)}}}}
               .dump()
        << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << nlohmann::json{{"error", {{"code", "io"}, {"message", e.what()}, {"command", to_string(config.command)}}}}
               .dump()
        << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", {{"code", "internal"}, {"message", e.what()}, {"command", to_string(config.command)}}}}
               .dump()
        << '\n';
    return exit_failure;
  }
}

std::vector<ValidationCheck> run_validation_suite() {
  std::vector<ValidationCheck> checks;
  auto record = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      record(name, false, std::string("threw: ") + e.what());
    }
  };

  guarded("laguerre_root_M1", [&] {
    const double e = eta_for_target(1);
    record("laguerre_root_M1", std::abs(e - std::sqrt(2.0)) < 1e-12, "eta = " + format_number(e));
  });
  guarded("laguerre_root_M2", [&] {
    const double e = eta_for_target(2);
    record("laguerre_root_M2", std::abs(e - std::sqrt(3.0 - std::sqrt(3.0))) < 1e-12, "eta = " + format_number(e));
  });
  guarded("bell_negativity", [&] {
    const ModeLayout l({{"b1", 2}, {"b2", 2}});
    Vector psi = Vector::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    const double n = negativity(DensityMatrix::pure(l, psi));
    record("bell_negativity", std::abs(n - 0.5) < 1e-10, "N = " + format_number(n));
  });
  guarded("product_negativity", [&] {
    const ModeLayout l({{"b1", 3}, {"b2", 3}});
    const double n = negativity(DensityMatrix::pure(l, kron(fock_ket(3, 1), fock_ket(3, 2))));
    record("product_negativity", std::abs(n) < 1e-12, "N = " + format_number(n));
  });
  guarded("vacuum_wln", [&] {
    const DensityMatrix vac = DensityMatrix::pure(ModeLayout::single("b", 4), fock_ket(4, 0));
    const double w = wln(vac, WignerGrid::for_state(vac));
    record("vacuum_wln", w <= 1e-3, "WLN = " + format_number(w));
  });
  guarded("fock1_wln", [&] {
    const DensityMatrix one = DensityMatrix::pure(ModeLayout::single("b", 4), fock_ket(4, 1));
    const double w = wln(one, WignerGrid::for_state(one));
    const double exact = std::log(4.0 * std::exp(-0.5) - 1.0);
    record("fock1_wln", std::abs(w - exact) < 1e-2, "WLN = " + format_number(w) + ", exact " + format_number(exact));
  });
  guarded("beam_splitter_unitary", [&] {
    const ModeLayout l({{"b1", 5}, {"b2", 5}});
    const Matrix u = beam_splitter_unitary(0.7, l).matrix();
    const double defect = max_abs(u * u.adjoint() - Matrix::Identity(u.rows(), u.cols()));
    record("beam_splitter_unitary", defect < 1e-12, "max|UU^dag - I| = " + format_number(defect));
  });
  guarded("dark_state_residual", [&] {
    ModelParams p;
    p.targets = {2, 2};
    p = calibrate(p);
    const ModeLayout l = cell_layout(p, 0);
    const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, l), build_dissipators(p, l));
    const DensityMatrix dark = initial_state(p, l, {MechanicalState::fock("B1", 2)});
    const double r = L.residual(dark.matrix());
    record("dark_state_residual", r < 1e-10, "||L rho_dark|| = " + format_number(r));
  });
  return checks;
}

}  // namespace phonon_forge::cli
