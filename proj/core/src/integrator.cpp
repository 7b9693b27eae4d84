#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"

namespace phonon_forge {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

double sparse_inf_norm(const SparseMatrix& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace

Integrator::Integrator(const Liouvillian& L, Vector state, const EvolveOptions& options)
    : L_(L), opt_(options), y_(std::move(state)) {
  if (y_.size() != L_.matrix().rows()) fail(ErrorCode::dimension_mismatch, "state does not match Liouvillian");
  const double norm = sparse_inf_norm(L_.matrix());
  h_ = opt_.initial_step > 0.0 ? opt_.initial_step : (norm > 0.0 ? 0.5 / norm : 1.0);
}

void Integrator::advance_to(double t_target) {
  if (t_target < t_) fail(ErrorCode::validation, "cannot integrate backwards");
  const SparseMatrix& A = L_.matrix();
  const Eigen::Index n = y_.size();
  Vector k1 = A * y_, k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);

  while (t_ < t_target) {
    const double remaining = t_target - t_;
    double h = std::min(h_, remaining);
    if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
    const bool clipped = h < h_;

    tmp = y_ + h * a21 * k1;
    k2 = A * tmp;
    tmp = y_ + h * (a31 * k1 + a32 * k2);
    k3 = A * tmp;
    tmp = y_ + h * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = A * tmp;
    tmp = y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = A * tmp;
    tmp = y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = A * tmp;
    y_new = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = A * y_new;

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx e = h * (e1 * k1(i) + e3 * k3(i) + e4 * k4(i) + e5 * k5(i) + e6 * k6(i) + e7 * k7(i));
      const double scale = opt_.atol + opt_.rtol * std::max(std::abs(y_(i)), std::abs(y_new(i)));
      const double r = std::abs(e) / scale;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      t_ = clipped && h == remaining ? t_target : t_ + h;
      y_.swap(y_new);
      k1.swap(k7);
      ++steps_;
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // A step shortened to land on t_target says nothing about the
      // admissible step size; keep the previous one.
      if (!clipped) h_ = h * factor;
    } else {
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
    }
    if (h_ < opt_.min_step) {
      std::ostringstream os;
      os << "step size underflow (h = " << h_ << " at t = " << t_
         << "); the problem is too stiff for explicit integration, use the steady_state solver";
      fail(ErrorCode::stiffness, os.str());
    }
    if (steps_ > opt_.max_steps) fail(ErrorCode::stiffness, "maximum number of integration steps exceeded");
  }
}

namespace {

DensityMatrix checked_state(const ModeLayout& layout, const Vector& v, const EvolveOptions& opt) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  Matrix rho = unvec(v, d);
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(Operator(layout, std::move(rho)), opt.output_tolerances);
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, double t_final, double dt_out,
                  const EvolveOptions& options) {
  if (!(rho0.layout() == L.layout())) {
    fail(ErrorCode::dimension_mismatch, "initial state layout " + rho0.layout().describe() +
                                            " does not match Liouvillian layout " + L.layout().describe());
  }
  if (!(dt_out > 0.0) || t_final < 0.0) fail(ErrorCode::validation, "need dt_out > 0 and t_final >= 0");

  const auto n_out = static_cast<std::size_t>(std::llround(std::ceil(t_final / dt_out - 1e-9)));
  Trajectory traj;
  traj.times.reserve(n_out + 1);
  traj.states.reserve(n_out + 1);

  auto record = [&](double t, const Vector& v) {
    traj.times.push_back(t);
    const Matrix raw = unvec(v, L.hilbert_dim());
    traj.trace_errors.push_back(std::abs(raw.trace() - 1.0));
    traj.hermiticity_defects.push_back(max_abs(raw - raw.adjoint()));
    traj.states.push_back(checked_state(L.layout(), v, options));
    traj.residuals.push_back(L.residual(traj.states.back().matrix()));
  };

  const Vector y0 = vec(rho0.matrix());
  record(0.0, y0);
  if (options.method == EvolveMethod::propagator) {
    const Matrix step = (Matrix(L.matrix()) * dt_out).exp();
    Vector y = y0;
    for (std::size_t k = 1; k <= n_out; ++k) {
      const double t = std::min(t_final, k * dt_out);
      if (t < k * dt_out) {
        y = (Matrix(L.matrix()) * (t - (k - 1) * dt_out)).exp() * y;
      } else {
        y = step * y;
      }
      record(t, y);
    }
  } else {
    Integrator integ(L, y0, options);
    for (std::size_t k = 1; k <= n_out; ++k) {
      const double t = std::min(t_final, k * dt_out);
      integ.advance_to(t);
      record(t, integ.state());
    }
    traj.steps = integ.steps();
  }
  traj.final_residual = traj.residuals.back();
  traj.converged = traj.final_residual < options.tol;
  return traj;
}

}  // namespace phonon_forge
