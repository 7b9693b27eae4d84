#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/measures.hpp"
#include "phonon_forge/model.hpp"
#include "phonon_forge/result_table.hpp"

namespace phonon_forge {

using Target = std::pair<int, int>;

/// Every input field of the params plus the derived calibration.
nlohmann::json to_json(const ModelParams& params);

/// Runs fn(i) for i in [0, n) on up to `parallelism` threads pulling indices
/// from a shared counter. fn must not touch shared mutable state.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

/// Thread count from PHONON_FORGE_THREADS, else hardware concurrency.
int default_parallelism();

struct PresetOptions {
  /// Template for every sweep point: chi_bar, kappa, scenario, eta_free, ...
  ModelParams base{};
  int parallelism = 1;
  SteadyOptions steady{};
  LogBase log_base = LogBase::natural;
  /// Re-run rows with population in the top phonon levels at d_m + 2 and
  /// record the measure shift.
  bool audit_truncation = true;
  /// Output samples per fig4 trajectory.
  int trajectory_samples = 101;
};

/// Reduced normal-mode state {B1, B2} at steady state.
struct MechanicalSolution {
  std::optional<DensityMatrix> rho;
  double residual = 0.0;
  bool converged = false;
  SteadyMethod method = SteadyMethod::time_marching;
  /// Raw solver-output diagnostics (worst over the solves involved).
  double trace_error = 0.0;
  double hermiticity_defect = 0.0;
  std::string error;
};

/// Steady state of the mechanical normal modes. IR solves each cell alone
/// (the cells do not interact) and takes the product; SR solves the joint
/// shared-cavity space. gamma > 0 uses the nullspace solver, gamma = 0 time
/// marching from vacuum (the fixed point depends on the initial state).
MechanicalSolution solve_mechanical_steady(const ModelParams& calibrated, const SteadyOptions& options);

/// Single cell (photon + normal mode) steady state, reduced to the phonon.
MechanicalSolution solve_cell_steady(const ModelParams& calibrated, int cell, const SteadyOptions& options);

struct PointMeasures {
  double negativity = 0.0;
  double purity = 0.0;
  double wln = 0.0;
};

/// Rotates to the uncoupled basis and evaluates N and P (and WLN of the
/// first uncoupled mode if requested).
PointMeasures measure_mechanical(const DensityMatrix& rho_B, double theta, bool with_wln,
                                 LogBase base = LogBase::natural);

/// Calibrated params for target (M1, M2), d_m = max(M) + 3.
ModelParams point_params(const ModelParams& base, Target target, double theta);

/// 25 points over (pi/8, 0.49 pi]: theta_i = pi/8 + i h, i = 1..25.
std::vector<double> default_theta_grid();

ResultTable run_fig2a(int m_max, double theta, const PresetOptions& options);
ResultTable run_fig2b(const std::vector<Target>& targets, const std::vector<double>& theta_grid,
                      const PresetOptions& options);
ResultTable run_fig3(Target target, const std::vector<double>& gamma_over_kappa,
                     const PresetOptions& options);
ResultTable run_fig4(Target target, double nbar, const std::vector<double>& gamma_over_kappa,
                     double t_final, const PresetOptions& options);
ResultTable run_fig5(const std::vector<Target>& targets, const std::vector<double>& theta_grid,
                     const PresetOptions& options);
ResultTable run_fig6(int m_max);

/// 2^{ln 2} = e^{(ln 2)^2}.
double tms_bound();

struct TmsRow {
  int m1 = 0;
  int m2 = 0;
  double theta = 0.0;
  double negativity = 0.0;
};

struct TmsReport {
  double bound = 0.0;
  std::vector<TmsRow> exceeding;
  int max_diagonal_m = 0;
  /// False when the table lacks diagonal targets with M >= 8.
  bool covers_high_m = false;
};

/// Rows of a fig2a/fig2b-style table (columns M1, M2, theta, N_inf) whose
/// negativity exceeds tms_bound().
TmsReport compare_tms_bound(const ResultTable& table);

}  // namespace phonon_forge
