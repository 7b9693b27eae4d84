#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phonon_forge/model.hpp"
#include "phonon_forge/operator.hpp"

namespace phonon_forge {

/// Column-stacking vectorization: vec(rho)[i + D j] = rho(i, j).
Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, Eigen::Index dim);

/// Generator of d rho/dt = -i[H, rho] + sum_k rate_k D[J_k] rho with
/// D[J] rho = 2 J rho J^dag - rho J^dag J - J^dag J rho.
class Liouvillian {
 public:
  Liouvillian(ModeLayout layout, SparseMatrix matrix);

  const ModeLayout& layout() const noexcept { return layout_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index hilbert_dim() const noexcept { return static_cast<Eigen::Index>(layout_.total_dim()); }

  Vector apply(const Vector& v) const { return matrix_ * v; }
  Matrix apply(const Matrix& rho) const;

  /// || L vec(rho) ||_inf
  double residual(const Matrix& rho) const;

  static constexpr const char* convention = "column-stacking";

 private:
  ModeLayout layout_;
  SparseMatrix matrix_;
};

Liouvillian build_liouvillian(const Operator& hamiltonian, const std::vector<LindbladTerm>& terms);

enum class EvolveMethod {
  /// Adaptive Dormand-Prince 5(4).
  dopri5,
  /// Dense exp(L dt_out) applied repeatedly; exact for time-independent L.
  /// For small spaces with fast coherent oscillations.
  propagator,
};

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::dopri5;
  double atol = 1e-10;
  double rtol = 1e-8;
  /// Convergence threshold on || L vec(rho) ||_inf.
  double tol = 1e-10;
  double initial_step = 0.0;  ///< 0 selects a heuristic
  double min_step = 1e-12;
  double max_step = 0.0;      ///< 0 = unbounded
  std::uint64_t max_steps = 50'000'000;
  StateTolerances output_tolerances = StateTolerances::relaxed();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> residuals;
  /// |Tr rho - 1| and max |rho - rho^dagger| before symmetrization.
  std::vector<double> trace_errors;
  std::vector<double> hermiticity_defects;
  bool converged = false;
  double final_residual = 0.0;
  std::uint64_t steps = 0;
};

/// Integrates vec(rho) (Dormand-Prince 5(4) by default), sampled every
/// dt_out up to t_final. Output states are Hermitian-symmetrized; trace and
/// PSD are checked (relaxed tolerances) but never corrected.
Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, double t_final, double dt_out,
                  const EvolveOptions& options = {});

/// Stateful integrator for callers that march without storing a trajectory.
class Integrator {
 public:
  Integrator(const Liouvillian& L, Vector state, const EvolveOptions& options);

  /// Integrates to `t_target` (>= current time).
  void advance_to(double t_target);

  double time() const noexcept { return t_; }
  const Vector& state() const noexcept { return y_; }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  const Liouvillian& L_;
  EvolveOptions opt_;
  Vector y_;
  double t_ = 0.0;
  double h_ = 0.0;
  std::uint64_t steps_ = 0;
};

enum class SteadyMethod { time_marching, nullspace };

std::string to_string(SteadyMethod m);
SteadyMethod steady_method_from_string(const std::string& s);

struct SteadyOptions {
  SteadyMethod method = SteadyMethod::time_marching;
  double tol = 1e-10;
  /// First convergence checkpoint; later ones double (ratio 2). Callers pass 10/kappa.
  double first_checkpoint = 1e4;
  int max_checkpoints = 40;
  /// Singular values below rel_tol * sigma_max count toward the nullspace.
  double nullspace_rel_tol = 1e-13;
  /// Above this Liouvillian size the nullspace dimension is probed by an LU
  /// conditioning test instead of a dense SVD.
  Eigen::Index dense_svd_limit = 1024;
  EvolveOptions evolve;
};

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;
  SteadyMethod method_used = SteadyMethod::time_marching;
  bool fell_back = false;
  int nullspace_dim = -1;  ///< -1 when not computed
  double time_reached = 0.0;
  int checkpoints = 0;
  /// |Tr rho - 1| and max |rho - rho^dagger| of the solver output before it
  /// is symmetrized and normalized.
  double raw_trace_error = 0.0;
  double raw_hermiticity_defect = 0.0;
};

SteadyState steady_state(const Liouvillian& L, const DensityMatrix& rho0, const SteadyOptions& options = {});

/// Nullspace dimension of L. Dense SVD singular-value count when
/// L.rows() <= dense_svd_limit, otherwise returns 1 or 2 (meaning ">= 2")
/// from an LU conditioning probe.
int nullspace_dimension(const Liouvillian& L, double rel_tol = 1e-13, Eigen::Index dense_svd_limit = 1024);

/// Versioned binary checkpoint: magic "PFCK", format version, layout
/// descriptor, time, vectorization convention, then vec(rho).
struct Checkpoint {
  ModeLayout layout;
  double time = 0.0;
  Vector state;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace phonon_forge
