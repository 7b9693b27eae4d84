#pragma once

#include "phonon_forge/mode_layout.hpp"
#include "phonon_forge/types.hpp"

namespace phonon_forge {

/// Complex square matrix bound to a ModeLayout.
class Operator {
 public:
  Operator(ModeLayout layout, Matrix matrix);

  static Operator identity(const ModeLayout& layout);
  static Operator zero(const ModeLayout& layout);

  const ModeLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  Operator adjoint() const { return {layout_, matrix_.adjoint()}; }
  cplx trace() const { return matrix_.trace(); }

  /// max |A - A^dagger| over all elements.
  double hermiticity_defect() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx scalar);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  ModeLayout layout_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);

/// Max-abs element norm.
double max_abs(const Matrix& m);

struct StateTolerances {
  double hermitian = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;

  static StateTolerances relaxed() { return {1e-8, 1e-6, -1e-6}; }
};

struct StateDiagnostics {
  double hermiticity_defect = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

StateDiagnostics diagnose(const Matrix& rho);

/// Hermitian, unit-trace, PSD-within-tolerance operator. Construction
/// validates; the PSD condition is monitored, never enforced by projection.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator op, const StateTolerances& tol = {});
  DensityMatrix(ModeLayout layout, Matrix matrix, const StateTolerances& tol = {})
      : DensityMatrix(Operator(std::move(layout), std::move(matrix)), tol) {}

  /// |psi><psi| for a normalized psi.
  static DensityMatrix pure(const ModeLayout& layout, const Vector& psi);

  const Operator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  const ModeLayout& layout() const noexcept { return op_.layout(); }
  Eigen::Index dim() const noexcept { return op_.dim(); }

  StateDiagnostics diagnostics() const { return diagnose(op_.matrix()); }

 private:
  Operator op_;
};

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

/// 0.5 * sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace phonon_forge
