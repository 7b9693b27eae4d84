#include "phonon_forge/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/laguerre.hpp"

#ifndef PHONON_FORGE_VERSION
#define PHONON_FORGE_VERSION "unknown"
#endif

namespace phonon_forge {

namespace {

const double kNaN = std::nan("");

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json pair_json(const std::array<double, 2>& a) { return nlohmann::json::array({a[0], a[1]}); }

nlohmann::json steady_json(const SteadyOptions& s) {
  return {{"tol", s.tol},
          {"first_checkpoint", s.first_checkpoint},
          {"max_checkpoints", s.max_checkpoints},
          {"nullspace_rel_tol", s.nullspace_rel_tol},
          {"atol", s.evolve.atol},
          {"rtol", s.evolve.rtol}};
}

nlohmann::json base_meta(const PresetOptions& o, const std::string& preset) {
  return {{"preset", preset},
          {"code_version", PHONON_FORGE_VERSION},
          {"units", "omega_m = 1"},
          {"params", to_json(o.base)},
          {"steady", steady_json(o.steady)},
          {"log_base", o.log_base == LogBase::two ? "2" : "e"},
          {"parallelism", o.parallelism},
          {"audit_truncation", o.audit_truncation}};
}

std::string status_of(const MechanicalSolution& s) {
  if (!s.error.empty()) return "error: " + s.error;
  return s.converged ? "ok" : "unconverged";
}

DensityMatrix relabel(const DensityMatrix& rho, const std::string& label) {
  return DensityMatrix(ModeLayout::single(label, static_cast<std::size_t>(rho.dim())), rho.matrix(),
                       StateTolerances::relaxed());
}

/// Steady phonon state of an IR cell with target M at truncation d. The cell
/// does not depend on the mixing angle or on the other cell.
struct CellKey {
  int target;
  int d_m;
  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend bool operator<(const CellKey& a, const CellKey& b) {
    return std::tie(a.target, a.d_m) < std::tie(b.target, b.d_m);
  }
};

ModelParams cell_params(const ModelParams& base, int target, int d_m) {
  ModelParams p = base;
  p.scenario = Scenario::individual;
  p.targets = {target, target};
  p.d_m = d_m;
  return calibrate(p);
}

using CellCache = std::map<CellKey, MechanicalSolution>;

void fill_cells(CellCache& cache, const std::vector<CellKey>& keys, const PresetOptions& o) {
  std::vector<CellKey> todo;
  for (const auto& k : keys)
    if (!cache.count(k) && std::find(todo.begin(), todo.end(), k) == todo.end()) todo.push_back(k);
  std::sort(todo.begin(), todo.end());
  std::vector<MechanicalSolution> out(todo.size());
  parallel_for(todo.size(), o.parallelism, [&](std::size_t i) {
    try {
      out[i] = solve_cell_steady(cell_params(o.base, todo[i].target, todo[i].d_m), 0, o.steady);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(todo[i], std::move(out[i]));
}

MechanicalSolution product_of(const MechanicalSolution& a, const MechanicalSolution& b) {
  MechanicalSolution s;
  if (!a.error.empty() || !b.error.empty()) {
    s.error = !a.error.empty() ? a.error : b.error;
    return s;
  }
  s.rho = tensor_product(relabel(*a.rho, "B1"), relabel(*b.rho, "B2"));
  s.residual = std::max(a.residual, b.residual);
  s.converged = a.converged && b.converged;
  s.method = a.method;
  s.trace_error = std::max(a.trace_error, b.trace_error);
  s.hermiticity_defect = std::max(a.hermiticity_defect, b.hermiticity_defect);
  return s;
}

/// Population in the top two phonon levels of either normal mode.
double top_population(const DensityMatrix& rho_B) {
  const auto d = static_cast<Eigen::Index>(rho_B.layout().mode(0).dim);
  double pop = 0.0;
  for (Eigen::Index i = 0; i < rho_B.dim(); ++i) {
    const Eigen::Index n1 = i / d;
    const Eigen::Index n2 = i % d;
    if (n1 >= d - 2 || n2 >= d - 2) pop += rho_B.matrix()(i, i).real();
  }
  return pop;
}

constexpr double kAuditFlag = 1e-8;

/// Steady states of IR diagonal / off-diagonal targets from the cell cache.
struct IrSolver {
  const PresetOptions& o;
  CellCache cache;

  void prepare(const std::vector<Target>& targets) {
    std::vector<CellKey> keys;
    for (const auto& t : targets) {
      const int d = std::max(t.first, t.second) + 3;
      keys.push_back({t.first, d});
      keys.push_back({t.second, d});
    }
    fill_cells(cache, keys, o);
  }

  MechanicalSolution solve(Target t, int d) {
    fill_cells(cache, {{t.first, d}, {t.second, d}}, o);
    return product_of(cache.at({t.first, d}), cache.at({t.second, d}));
  }
};

struct MeasuredRow {
  PointMeasures m{kNaN, kNaN, kNaN};
  double audit_shift = kNaN;
  std::string status;
};

MeasuredRow measure_row(IrSolver& ir, Target t, double theta, bool with_wln, const PresetOptions& o,
                        const MechanicalSolution& sol) {
  MeasuredRow row;
  row.status = status_of(sol);
  if (!sol.rho) return row;
  try {
    row.m = measure_mechanical(*sol.rho, theta, with_wln, o.log_base);
    if (o.audit_truncation && top_population(*sol.rho) > kAuditFlag) {
      const int d = std::max(t.first, t.second) + 3;
      const MechanicalSolution wide = ir.solve(t, d + 2);
      if (wide.rho) {
        const PointMeasures w = measure_mechanical(*wide.rho, theta, with_wln, o.log_base);
        row.audit_shift = std::max(std::abs(w.negativity - row.m.negativity), std::abs(w.purity - row.m.purity));
        if (with_wln) row.audit_shift = std::max(row.audit_shift, std::abs(w.wln - row.m.wln));
        if (row.audit_shift >= 1e-4) row.status = "truncation-sensitive";
      }
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

std::vector<Column> steady_columns(bool with_wln) {
  std::vector<Column> c{{"M1", "1"}, {"M2", "1"}, {"theta", "rad"}};
  if (with_wln) c.push_back({"WLN", "1"});
  c.insert(c.end(), {{"N_inf", "1"}, {"P_inf", "1"}, {"residual", "1"}, {"d_m", "1"}, {"audit_shift", "1"},
                     {"status", "1"}});
  return c;
}

ResultTable theta_sweep(const std::string& name, const std::vector<Target>& targets,
                        const std::vector<double>& theta_grid, bool with_wln, const PresetOptions& o) {
  const auto start = Clock::now();
  IrSolver ir{o, {}};
  ir.prepare(targets);
  std::vector<MechanicalSolution> sols;
  for (const auto& t : targets) sols.push_back(ir.solve(t, std::max(t.first, t.second) + 3));
  if (o.audit_truncation) {
    // Wider cells for flagged targets are solved up front; the parallel map below only reads the cache.
    for (std::size_t k = 0; k < targets.size(); ++k)
      if (sols[k].rho && top_population(*sols[k].rho) > kAuditFlag)
        ir.solve(targets[k], std::max(targets[k].first, targets[k].second) + 5);
  }

  const std::size_t n = targets.size() * theta_grid.size();
  std::vector<MeasuredRow> rows(n);
  parallel_for(n, o.parallelism, [&](std::size_t i) {
    const std::size_t k = i / theta_grid.size();
    rows[i] = measure_row(ir, targets[k], theta_grid[i % theta_grid.size()], with_wln, o, sols[k]);
  });

  ResultTable table(name, steady_columns(with_wln));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i / theta_grid.size();
    const auto& t = targets[k];
    std::vector<Cell> row{std::int64_t{t.first}, std::int64_t{t.second}, theta_grid[i % theta_grid.size()]};
    if (with_wln) row.emplace_back(rows[i].m.wln);
    row.insert(row.end(), {rows[i].m.negativity, rows[i].m.purity, sols[k].residual,
                           std::int64_t{std::max(t.first, t.second) + 3}, rows[i].audit_shift, rows[i].status});
    table.add_row(std::move(row));
  }
  table.sort_rows(3);
  table.meta = base_meta(o, name);
  table.meta["duration_s"] = seconds_since(start);
  double worst = 0.0;
  for (const auto& s : sols) worst = std::max(worst, s.residual);
  table.meta["max_residual"] = worst;
  return table;
}

}  // namespace

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j = {{"omega_m", p.omega_m},
                      {"theta", p.theta},
                      {"targets", {p.targets[0], p.targets[1]}},
                      {"chi_bar", p.chi_bar},
                      {"kappa", pair_json(p.kappa)},
                      {"gamma", pair_json(p.gamma)},
                      {"nbar", pair_json(p.nbar)},
                      {"scenario", to_string(p.scenario)},
                      {"d_m", p.phonon_dim()},
                      {"d_c", p.d_c},
                      {"eta_free", p.eta_free}};
  if (p.omega_drive_override) j["omega_drive_override"] = pair_json(*p.omega_drive_override);
  if (p.calibrated) {
    j["eta"] = pair_json(p.eta);
    j["omega_drive"] = pair_json(p.omega_drive);
    j["delta"] = pair_json(p.delta);
    j["warnings"] = p.warnings;
  }
  return j;
}

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, parallelism));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_parallelism() {
  if (const char* env = std::getenv("PHONON_FORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

SteadyOptions policy_for(const ModelParams& p, const SteadyOptions& options, double gamma) {
  SteadyOptions o = options;
  o.method = gamma > 0.0 ? SteadyMethod::nullspace : SteadyMethod::time_marching;
  const double kappa = std::max(p.kappa[0], p.kappa[1]);
  if (kappa > 0.0) o.first_checkpoint = 10.0 / kappa;
  return o;
}

MechanicalSolution solve_on(const ModelParams& p, const ModeLayout& layout, const std::vector<std::string>& keep,
                            const SteadyOptions& options) {
  MechanicalSolution out;
  double gamma = 0.0;
  for (const auto& label : keep) gamma = std::max(gamma, p.gamma[cell_of_phonon_label(label)]);
  const SteadyOptions o = policy_for(p, options, gamma);
  out.method = o.method;
  try {
    const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, layout), build_dissipators(p, layout));
    const SteadyState ss = steady_state(L, initial_state(p, layout), o);
    out.rho = partial_trace(ss.rho, keep);
    out.residual = ss.residual;
    out.method = ss.method_used;
    out.converged = ss.residual <= std::max(o.tol, 1e-9);
    out.trace_error = ss.raw_trace_error;
    out.hermiticity_defect = ss.raw_hermiticity_defect;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

MechanicalSolution solve_cell_steady(const ModelParams& calibrated, int cell, const SteadyOptions& options) {
  if (!calibrated.calibrated) fail(ErrorCode::validation, "parameters must be calibrated");
  const std::string c = std::to_string(cell + 1);
  return solve_on(calibrated, cell_layout(calibrated, cell), {"B" + c}, options);
}

MechanicalSolution solve_mechanical_steady(const ModelParams& calibrated, const SteadyOptions& options) {
  if (!calibrated.calibrated) fail(ErrorCode::validation, "parameters must be calibrated");
  if (calibrated.scenario == Scenario::shared) {
    return solve_on(calibrated, effective_layout(calibrated), {"B1", "B2"}, options);
  }
  return product_of(solve_cell_steady(calibrated, 0, options), solve_cell_steady(calibrated, 1, options));
}

PointMeasures measure_mechanical(const DensityMatrix& rho_B, double theta, bool with_wln, LogBase base) {
  PointMeasures m;
  const DensityMatrix rotated = rotate_to_uncoupled(rho_B, theta);
  m.negativity = negativity(rotated);
  m.purity = purity(rho_B);
  m.wln = kNaN;
  if (with_wln) {
    const DensityMatrix first = partial_trace(rotated, {"b1"});
    m.wln = wln(first, WignerGrid::for_state(first), base);
  }
  return m;
}

ModelParams point_params(const ModelParams& base, Target target, double theta) {
  ModelParams p = base;
  p.targets = {target.first, target.second};
  p.theta = theta;
  p.d_m = std::max(target.first, target.second) + 3;
  return calibrate(p);
}

std::vector<double> default_theta_grid() {
  const double lo = pi / 8;
  const double hi = 0.49 * pi;
  const int n = 25;
  const double h = (hi - lo) / n;
  std::vector<double> g;
  for (int i = 1; i <= n; ++i) g.push_back(lo + i * h);
  return g;
}

ResultTable run_fig2a(int m_max, double theta, const PresetOptions& options) {
  if (m_max < 1) fail(ErrorCode::validation, "m_max must be >= 1");
  std::vector<Target> targets;
  for (int m1 = 1; m1 <= m_max; ++m1)
    for (int m2 = 1; m2 <= m_max; ++m2) targets.push_back({m1, m2});
  ResultTable t = theta_sweep("fig2a", targets, {theta}, false, options);
  t.meta["m_max"] = m_max;
  t.meta["theta"] = theta;
  return t;
}

ResultTable run_fig2b(const std::vector<Target>& targets, const std::vector<double>& theta_grid,
                      const PresetOptions& options) {
  ResultTable t = theta_sweep("fig2b", targets, theta_grid, false, options);
  t.meta["theta_grid"] = theta_grid;
  return t;
}

ResultTable run_fig5(const std::vector<Target>& targets, const std::vector<double>& theta_grid,
                     const PresetOptions& options) {
  ResultTable t = theta_sweep("fig5", targets, theta_grid, true, options);
  t.meta["theta_grid"] = theta_grid;
  return t;
}

ResultTable run_fig3(Target target, const std::vector<double>& gamma_over_kappa, const PresetOptions& options) {
  const auto start = Clock::now();
  const double theta = options.base.theta;
  struct Job {
    Scenario scenario;
    double gk;
  };
  std::vector<Job> jobs;
  for (const Scenario s : {Scenario::individual, Scenario::shared})
    for (const double gk : gamma_over_kappa) jobs.push_back({s, gk});

  struct Out {
    MechanicalSolution sol;
    PointMeasures m{kNaN, kNaN, kNaN};
    std::string status;
  };
  std::vector<Out> out(jobs.size());
  parallel_for(jobs.size(), options.parallelism, [&](std::size_t i) {
    try {
      ModelParams p = options.base;
      p.scenario = jobs[i].scenario;
      for (int n = 0; n < 2; ++n) p.gamma[n] = jobs[i].gk * p.kappa[n];
      p = point_params(p, target, theta);
      out[i].sol = solve_mechanical_steady(p, options.steady);
      out[i].status = status_of(out[i].sol);
      if (out[i].sol.rho) out[i].m = measure_mechanical(*out[i].sol.rho, theta, false);
    } catch (const std::exception& e) {
      out[i].status = std::string("error: ") + e.what();
    }
  });

  ResultTable table("fig3", {{"scenario", "1"},
                             {"gamma_over_kappa", "1"},
                             {"theta", "rad"},
                             {"N_inf", "1"},
                             {"P_inf", "1"},
                             {"residual", "1"},
                             {"method", "1"},
                             {"status", "1"}});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    table.add_row({to_string(jobs[i].scenario), jobs[i].gk, theta, out[i].m.negativity, out[i].m.purity,
                   out[i].sol.residual, to_string(out[i].sol.method), out[i].status});
  }
  table.sort_rows(2);
  table.meta = base_meta(options, "fig3");
  table.meta["target"] = {target.first, target.second};
  table.meta["gamma_over_kappa"] = gamma_over_kappa;
  table.meta["duration_s"] = seconds_since(start);
  return table;
}

ResultTable run_fig4(Target target, double nbar, const std::vector<double>& gamma_over_kappa, double t_final,
                     const PresetOptions& options) {
  if (!(t_final > 0.0)) fail(ErrorCode::validation, "t_final must be positive");
  if (options.trajectory_samples < 2) fail(ErrorCode::validation, "trajectory_samples must be >= 2");
  const auto start = Clock::now();
  const double theta = options.base.theta;
  const double dt = t_final / (options.trajectory_samples - 1);

  struct Curve {
    std::vector<double> t, n, p, residual, trace_error, herm;
    std::string status = "ok";
  };
  std::vector<Curve> curves(gamma_over_kappa.size());
  parallel_for(gamma_over_kappa.size(), options.parallelism, [&](std::size_t i) {
    Curve& c = curves[i];
    try {
      ModelParams p = options.base;
      p.scenario = Scenario::individual;
      p.nbar = {nbar, nbar};
      for (int n = 0; n < 2; ++n) p.gamma[n] = gamma_over_kappa[i] * p.kappa[n];
      p = point_params(p, target, theta);
      std::array<Trajectory, 2> traj;
      for (int cell = 0; cell < 2; ++cell) {
        const ModeLayout layout = cell_layout(p, cell);
        const Liouvillian L =
            build_liouvillian(build_effective_hamiltonian(p, layout), build_dissipators(p, layout));
        traj[cell] = evolve(initial_state(p, layout), L, t_final, dt, options.steady.evolve);
      }
      for (std::size_t k = 0; k < traj[0].times.size(); ++k) {
        const DensityMatrix b1 = partial_trace(traj[0].states[k], {"B1"});
        const DensityMatrix b2 = partial_trace(traj[1].states[k], {"B2"});
        const PointMeasures m = measure_mechanical(tensor_product(b1, b2), theta, false);
        c.t.push_back(traj[0].times[k]);
        c.n.push_back(m.negativity);
        c.p.push_back(m.purity);
        c.residual.push_back(std::max(traj[0].residuals[k], traj[1].residuals[k]));
        c.trace_error.push_back(std::max(traj[0].trace_errors[k], traj[1].trace_errors[k]));
        c.herm.push_back(std::max(traj[0].hermiticity_defects[k], traj[1].hermiticity_defects[k]));
      }
    } catch (const std::exception& e) {
      c = Curve{};
      c.status = std::string("error: ") + e.what();
    }
  });

  ResultTable table("fig4", {{"gamma_over_kappa", "1"},
                             {"t", "omega_m^-1"},
                             {"N_t", "1"},
                             {"P_t", "1"},
                             {"residual", "1"},
                             {"trace_error", "1"},
                             {"hermiticity_defect", "1"},
                             {"status", "1"}});
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Curve& c = curves[i];
    if (c.t.empty()) {
      table.add_row({gamma_over_kappa[i], kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, c.status});
      continue;
    }
    for (std::size_t k = 0; k < c.t.size(); ++k) {
      table.add_row({gamma_over_kappa[i], c.t[k], c.n[k], c.p[k], c.residual[k], c.trace_error[k], c.herm[k],
                     c.status});
    }
  }
  table.sort_rows(2);
  table.meta = base_meta(options, "fig4");
  table.meta["target"] = {target.first, target.second};
  table.meta["nbar"] = nbar;
  table.meta["gamma_over_kappa"] = gamma_over_kappa;
  table.meta["t_final"] = t_final;
  table.meta["dt_out"] = dt;
  table.meta["initial_state"] = "vacuum";
  table.meta["duration_s"] = seconds_since(start);
  return table;
}

ResultTable run_fig6(int m_max) {
  if (m_max < 1) fail(ErrorCode::validation, "m_max must be >= 1");
  ResultTable table("fig6", {{"M", "1"}, {"eta", "1"}});
  for (int m = 1; m <= m_max; ++m) table.add_row({std::int64_t{m}, eta_for_target(m)});
  table.meta = {{"preset", "fig6"}, {"code_version", PHONON_FORGE_VERSION}, {"units", "omega_m = 1"},
                {"m_max", m_max}};
  return table;
}

double tms_bound() { return std::exp(std::log(2.0) * std::log(2.0)); }

TmsReport compare_tms_bound(const ResultTable& table) {
  TmsReport r;
  r.bound = tms_bound();
  for (std::size_t i = 0; i < table.size(); ++i) {
    TmsRow row;
    row.m1 = static_cast<int>(table.number(i, "M1"));
    row.m2 = static_cast<int>(table.number(i, "M2"));
    row.theta = table.number(i, "theta");
    row.negativity = table.number(i, "N_inf");
    if (row.m1 == row.m2 && !std::isnan(row.negativity)) r.max_diagonal_m = std::max(r.max_diagonal_m, row.m1);
    if (row.negativity > r.bound) r.exceeding.push_back(row);
  }
  r.covers_high_m = r.max_diagonal_m >= 8;
  return r;
}

}  // namespace phonon_forge
