#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseLU>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"

namespace phonon_forge {

std::string to_string(SteadyMethod m) { return m == SteadyMethod::time_marching ? "time-marching" : "nullspace"; }

SteadyMethod steady_method_from_string(const std::string& s) {
  if (s == "time-marching" || s == "time_marching") return SteadyMethod::time_marching;
  if (s == "nullspace") return SteadyMethod::nullspace;
  fail(ErrorCode::config, "unknown steady-state method '" + s + "' (expected time-marching or nullspace)");
}

namespace {

/// L with the row of the (0,0) population equation replaced by the trace.
SparseMatrix trace_constrained(const Liouvillian& L) {
  const Eigen::Index d = L.hilbert_dim();
  const SparseMatrix& m = L.matrix();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(m.nonZeros() + d));
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), j, it.value());
  for (Eigen::Index i = 0; i < d; ++i) t.emplace_back(0, i + d * i, 1.0);
  SparseMatrix a(m.rows(), m.cols());
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

double max_abs_entry(const SparseMatrix& m) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

SteadyState to_state(const Liouvillian& L, const Vector& v) {
  Matrix rho = unvec(v, L.hilbert_dim());
  const double trace_error = std::abs(rho.trace() - 1.0);
  const double defect = max_abs(rho - rho.adjoint());
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  SteadyState out{DensityMatrix(Operator(L.layout(), std::move(rho)), StateTolerances::relaxed())};
  out.residual = L.residual(out.rho.matrix());
  out.raw_trace_error = trace_error;
  out.raw_hermiticity_defect = defect;
  return out;
}

SteadyState march(const Liouvillian& L, const DensityMatrix& rho0, const SteadyOptions& opt) {
  Integrator integ(L, vec(rho0.matrix()), opt.evolve);
  const Eigen::Index d = L.hilbert_dim();
  std::vector<double> times, residuals;
  double t_next = opt.first_checkpoint;
  for (int k = 0; k < opt.max_checkpoints; ++k, t_next *= 2.0) {
    integ.advance_to(t_next);
    const double r = L.residual(unvec(integ.state(), d));
    times.push_back(t_next);
    residuals.push_back(r);
    if (r < opt.tol) {
      SteadyState out = to_state(L, integ.state());
      out.method_used = SteadyMethod::time_marching;
      out.time_reached = t_next;
      out.checkpoints = k + 1;
      return out;
    }
  }
  std::ostringstream os;
  os << "time marching did not reach residual " << opt.tol << " by t = " << times.back()
     << " (residual " << residuals.back() << ")";
  if (residuals.size() >= 2 && residuals.back() > 0.0) {
    const std::size_t n = residuals.size();
    const double rate = std::log(residuals[n - 2] / residuals[n - 1]) / (times[n - 1] - times[n - 2]);
    os << "; slowest decay rate estimate " << rate;
  }
  fail(ErrorCode::non_convergence, os.str());
}

}  // namespace

namespace {

/// Uniqueness probe on an already factored trace-constrained Liouvillian:
/// the system is singular iff the nullspace of L is degenerate.
int probe_nullity(const SparseMatrix& a, Eigen::SparseLU<SparseMatrix>& lu, double rel_tol) {
  if (lu.info() != Eigen::Success) return 2;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Vector b(a.rows());
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = cplx(normal(rng), normal(rng));
  const Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) return 2;
  const double growth = max_abs_entry(a) * x.norm() / b.norm();
  return growth > 1.0 / rel_tol ? 2 : 1;
}

int dense_nullity(const SparseMatrix& m, double rel_tol) {
  const Matrix dense(m);
  Eigen::BDCSVD<Matrix> svd(dense);
  const auto& s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  int count = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= cutoff) ++count;
  return count;
}

}  // namespace

int nullspace_dimension(const Liouvillian& L, double rel_tol, Eigen::Index dense_svd_limit) {
  if (L.matrix().rows() <= dense_svd_limit) return dense_nullity(L.matrix(), rel_tol);
  const SparseMatrix a = trace_constrained(L);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  return probe_nullity(a, lu, rel_tol);
}

SteadyState steady_state(const Liouvillian& L, const DensityMatrix& rho0, const SteadyOptions& options) {
  if (!(rho0.layout() == L.layout())) {
    fail(ErrorCode::dimension_mismatch, "initial state layout does not match the Liouvillian");
  }
  if (options.method == SteadyMethod::time_marching) return march(L, rho0, options);

  const SparseMatrix a = trace_constrained(L);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  const int nullity = L.matrix().rows() <= options.dense_svd_limit
                          ? dense_nullity(L.matrix(), options.nullspace_rel_tol)
                          : probe_nullity(a, lu, options.nullspace_rel_tol);
  if (nullity > 1) {
    // Several fixed points: the answer depends on rho0, so follow the dynamics.
    SteadyState out = march(L, rho0, options);
    out.fell_back = true;
    out.nullspace_dim = nullity;
    return out;
  }
  if (lu.info() != Eigen::Success) fail(ErrorCode::non_convergence, "sparse LU of the Liouvillian failed");
  Vector b = Vector::Zero(a.rows());
  b(0) = 1.0;
  const Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    fail(ErrorCode::non_convergence, "nullspace solve failed");
  }
  SteadyState out = to_state(L, x);
  out.method_used = SteadyMethod::nullspace;
  out.nullspace_dim = nullity;
  return out;
}

}  // namespace phonon_forge
