#include "phonon_forge/fock.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "phonon_forge/error.hpp"

namespace phonon_forge {

namespace {

void require_dim(std::size_t dim) {
  if (dim < 2) fail(ErrorCode::invalid_dimension, "Fock truncation must be at least 2, got " + std::to_string(dim));
}

ModeLayout single_layout(std::size_t dim) { return ModeLayout::single(kSingleModeLabel, dim); }

}  // namespace

Operator destroy(std::size_t dim) {
  require_dim(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {single_layout(dim), std::move(m)};
}

Operator create(std::size_t dim) { return destroy(dim).adjoint(); }

Operator number(std::size_t dim) {
  require_dim(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) m(n, n) = static_cast<double>(n);
  return {single_layout(dim), std::move(m)};
}

Vector fock_ket(std::size_t dim, std::size_t n) {
  if (n >= dim) fail(ErrorCode::invalid_dimension, "Fock level outside truncation");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return v;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix expm(const Matrix& m) { return m.exp(); }

Operator embed(const Operator& op, const ModeLayout& layout, const std::string& target_label) {
  const std::size_t target = layout.index_of(target_label);
  if (op.layout().total_dim() != layout.mode(target).dim) {
    fail(ErrorCode::dimension_mismatch, "operator of dimension " + std::to_string(op.layout().total_dim()) +
                                            " cannot act on mode '" + target_label + "' of dimension " +
                                            std::to_string(layout.mode(target).dim));
  }
  const auto left = static_cast<Eigen::Index>(layout.total_dim() / layout.stride(target) / layout.mode(target).dim);
  const auto right = static_cast<Eigen::Index>(layout.stride(target));
  Matrix m = kron(Matrix::Identity(left, left), kron(op.matrix(), Matrix::Identity(right, right)));
  return {layout, std::move(m)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  const ModeLayout& layout = rho.layout();
  const ModeLayout kept = layout.sublayout(keep);
  const std::size_t n_modes = layout.size();

  std::vector<bool> is_kept(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) is_kept[i] = kept.contains(layout.mode(i).label);

  // Full basis index for every (kept, traced) multi-index pair.
  const std::size_t dk = kept.total_dim();
  const std::size_t dt = layout.total_dim() / dk;
  std::vector<Eigen::Index> full(dk * dt);
  std::vector<std::size_t> digits(n_modes);
  for (std::size_t idx = 0; idx < layout.total_dim(); ++idx) {
    std::size_t rem = idx;
    for (std::size_t m = n_modes; m-- > 0;) {
      digits[m] = rem % layout.mode(m).dim;
      rem /= layout.mode(m).dim;
    }
    std::size_t k = 0, t = 0;
    for (std::size_t m = 0; m < n_modes; ++m) {
      if (is_kept[m])
        k = k * layout.mode(m).dim + digits[m];
      else
        t = t * layout.mode(m).dim + digits[m];
    }
    full[k * dt + t] = static_cast<Eigen::Index>(idx);
  }

  const Matrix& r = rho.matrix();
  const auto dkk = static_cast<Eigen::Index>(dk);
  Matrix out = Matrix::Zero(dkk, dkk);
  for (Eigen::Index j = 0; j < dkk; ++j)
    for (Eigen::Index i = 0; i < dkk; ++i) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) acc += r(full[i * dt + t], full[j * dt + t]);
      out(i, j) = acc;
    }
  return DensityMatrix(Operator(kept, std::move(out)), StateTolerances::relaxed());
}

Operator partial_transpose(const DensityMatrix& rho, const std::string& mode_label) {
  const ModeLayout& layout = rho.layout();
  if (layout.size() != 2) fail(ErrorCode::validation, "partial transpose needs a two-mode layout, got " + layout.describe());
  const std::size_t which = layout.index_of(mode_label);
  const auto da = static_cast<Eigen::Index>(layout.mode(0).dim);
  const auto db = static_cast<Eigen::Index>(layout.mode(1).dim);
  const Matrix& r = rho.matrix();
  Matrix out(r.rows(), r.cols());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b)
      for (Eigen::Index a2 = 0; a2 < da; ++a2)
        for (Eigen::Index b2 = 0; b2 < db; ++b2) {
          const cplx v = which == 0 ? r(a2 * db + b, a * db + b2) : r(a * db + b2, a2 * db + b);
          out(a * db + b, a2 * db + b2) = v;
        }
  return {layout, std::move(out)};
}

Operator displacement(cplx alpha, std::size_t dim) {
  const Operator b = destroy(dim);
  const Matrix gen = alpha * b.matrix().adjoint() - std::conj(alpha) * b.matrix();
  return {single_layout(dim), expm(gen)};
}

SparseMatrix beam_splitter_matrix(double theta, std::size_t dim) {
  require_dim(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<Eigen::Triplet<cplx>> triplets;
  // The generator conserves n1 + n2, so exponentiate sector by sector.
  for (Eigen::Index total = 0; total <= 2 * (d - 1); ++total) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, total - (d - 1));
    const Eigen::Index hi = std::min<Eigen::Index>(total, d - 1);
    const Eigen::Index size = hi - lo + 1;
    Matrix gen = Matrix::Zero(size, size);
    for (Eigen::Index n1 = lo; n1 < hi; ++n1) {
      // b1^dag b2 |n1, n2> = sqrt((n1 + 1) n2) |n1 + 1, n2 - 1>
      const double amp = std::sqrt(static_cast<double>((n1 + 1) * (total - n1)));
      gen(n1 + 1 - lo, n1 - lo) += theta * amp;
      gen(n1 - lo, n1 + 1 - lo) -= theta * amp;
    }
    const Matrix block = expm(gen);
    for (Eigen::Index c = 0; c < size; ++c)
      for (Eigen::Index r = 0; r < size; ++r) {
        const Eigen::Index n1 = lo + r;
        const Eigen::Index n2 = total - n1;
        const cplx v = (n2 % 2 == 0 ? 1.0 : -1.0) * block(r, c);
        if (std::abs(v) > 0.0) {
          triplets.emplace_back(n1 * d + n2, (lo + c) * d + (total - lo - c), v);
        }
      }
  }
  SparseMatrix u(d * d, d * d);
  u.setFromTriplets(triplets.begin(), triplets.end());
  return u;
}

Operator beam_splitter_unitary(double theta, const ModeLayout& layout) {
  if (layout.size() != 2) fail(ErrorCode::validation, "beam splitter needs a two-mode layout");
  const std::size_t d = layout.mode(0).dim;
  if (layout.mode(1).dim != d) {
    fail(ErrorCode::dimension_mismatch, "beam splitter needs equal mode dimensions, got " + layout.describe());
  }
  return {layout, Matrix(beam_splitter_matrix(theta, d))};
}

}  // namespace phonon_forge
