#include "phonon_forge/operator.hpp"

#include <sstream>

#include "phonon_forge/error.hpp"

namespace phonon_forge {

Operator::Operator(ModeLayout layout, Matrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != matrix_.cols()) {
    fail(ErrorCode::dimension_mismatch, "operator matrix is not square");
  }
  if (matrix_.rows() != d) {
    std::ostringstream os;
    os << "operator dimension " << matrix_.rows() << " does not match layout " << layout_.describe()
       << " (total " << d << ")";
    fail(ErrorCode::dimension_mismatch, os.str());
  }
}

Operator Operator::identity(const ModeLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  return {layout, Matrix::Identity(d, d)};
}

Operator Operator::zero(const ModeLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  return {layout, Matrix::Zero(d, d)};
}

double Operator::hermiticity_defect() const { return max_abs(matrix_ - matrix_.adjoint()); }

namespace {
void require_same_layout(const ModeLayout& a, const ModeLayout& b) {
  if (!(a == b)) {
    fail(ErrorCode::dimension_mismatch, "layout mismatch: " + a.describe() + " vs " + b.describe());
  }
}
}  // namespace

Operator& Operator::operator+=(const Operator& other) {
  require_same_layout(layout_, other.layout_);
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_layout(layout_, other.layout_);
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(cplx scalar) {
  matrix_ *= scalar;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_layout(a.layout(), b.layout());
  return {a.layout(), a.matrix() * b.matrix()};
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

StateDiagnostics diagnose(const Matrix& rho) {
  StateDiagnostics d;
  d.hermiticity_defect = max_abs(rho - rho.adjoint());
  d.trace_error = std::abs(rho.trace() - cplx{1.0, 0.0});
  const Matrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(Operator op, const StateTolerances& tol) : op_(std::move(op)) {
  const auto d = diagnose(op_.matrix());
  std::ostringstream os;
  if (d.hermiticity_defect > tol.hermitian) {
    os << "density matrix not Hermitian (defect " << d.hermiticity_defect << ")";
  } else if (d.trace_error > tol.trace) {
    os << "density matrix trace off by " << d.trace_error;
  } else if (d.min_eigenvalue < tol.min_eigenvalue) {
    os << "density matrix has eigenvalue " << d.min_eigenvalue;
  } else {
    return;
  }
  fail(ErrorCode::invalid_state, os.str());
}

DensityMatrix DensityMatrix::pure(const ModeLayout& layout, const Vector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) fail(ErrorCode::invalid_state, "state vector is not normalized");
  return DensityMatrix(Operator(layout, psi * psi.adjoint()));
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<Mode> modes = a.layout().modes();
  modes.insert(modes.end(), b.layout().modes().begin(), b.layout().modes().end());
  const Matrix& ma = a.matrix();
  const Matrix& mb = b.matrix();
  Matrix out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i)
    for (Eigen::Index j = 0; j < ma.cols(); ++j)
      out.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
  return DensityMatrix(Operator(ModeLayout(std::move(modes)), std::move(out)), StateTolerances::relaxed());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.layout() == b.layout())) {
    fail(ErrorCode::dimension_mismatch, "trace distance between different layouts");
  }
  const Matrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace phonon_forge
