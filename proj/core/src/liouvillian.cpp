#include <cmath>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"

namespace phonon_forge {

Vector vec(const Matrix& rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

Matrix unvec(const Vector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) fail(ErrorCode::dimension_mismatch, "vectorized state has the wrong length");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Liouvillian::Liouvillian(ModeLayout layout, SparseMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != d * d || matrix_.cols() != d * d) {
    fail(ErrorCode::dimension_mismatch, "Liouvillian size does not match layout " + layout_.describe());
  }
  matrix_.makeCompressed();
}

Matrix Liouvillian::apply(const Matrix& rho) const { return unvec(matrix_ * vec(rho), rho.rows()); }

double Liouvillian::residual(const Matrix& rho) const {
  const Vector r = matrix_ * vec(rho);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

namespace {

SparseMatrix to_sparse(const Matrix& m) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != cplx(0.0)) t.emplace_back(i, j, m(i, j));
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

/// Appends scale * (A kron B) to the triplet list.
void add_kron(std::vector<Eigen::Triplet<cplx>>& out, const SparseMatrix& a, const SparseMatrix& b, cplx scale) {
  for (Eigen::Index ja = 0; ja < a.outerSize(); ++ja)
    for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia)
      for (Eigen::Index jb = 0; jb < b.outerSize(); ++jb)
        for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib)
          out.emplace_back(ia.row() * b.rows() + ib.row(), ja * b.cols() + jb, scale * ia.value() * ib.value());
}

}  // namespace

Liouvillian build_liouvillian(const Operator& hamiltonian, const std::vector<LindbladTerm>& terms) {
  const ModeLayout& layout = hamiltonian.layout();
  const Eigen::Index d = hamiltonian.dim();
  SparseMatrix id(d, d);
  id.setIdentity();

  std::vector<Eigen::Triplet<cplx>> t;
  // vec(A rho B) = (B^T kron A) vec(rho)
  const SparseMatrix h = to_sparse(hamiltonian.matrix());
  const SparseMatrix ht = to_sparse(hamiltonian.matrix().transpose());
  add_kron(t, id, h, -imag_unit);
  add_kron(t, ht, id, imag_unit);

  for (const auto& term : terms) {
    if (!(term.jump.layout() == layout)) {
      fail(ErrorCode::dimension_mismatch, "jump operator '" + term.name + "' is on layout " +
                                              term.jump.layout().describe() + ", Hamiltonian on " + layout.describe());
    }
    if (term.rate < 0.0) fail(ErrorCode::validation, "negative rate for '" + term.name + "'");
    if (term.rate == 0.0) continue;
    const Matrix& j = term.jump.matrix();
    const Matrix jdj = j.adjoint() * j;
    add_kron(t, to_sparse(j.conjugate()), to_sparse(j), 2.0 * term.rate);
    add_kron(t, id, to_sparse(jdj), -term.rate);
    add_kron(t, to_sparse(jdj.transpose()), id, -term.rate);
  }
  SparseMatrix l(d * d, d * d);
  l.setFromTriplets(t.begin(), t.end());
  l.prune(cplx(0.0), 0.0);
  return Liouvillian(layout, std::move(l));
}

}  // namespace phonon_forge
