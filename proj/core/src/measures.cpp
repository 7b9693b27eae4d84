#include <cmath>
#include <fstream>

#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/measures.hpp"
#include "phonon_forge/result_table.hpp"

namespace phonon_forge {

DensityMatrix rotate_to_uncoupled(const DensityMatrix& rho_mech, double theta) {
  const ModeLayout& in = rho_mech.layout();
  if (in.size() != 2 || in.mode(0).dim != in.mode(1).dim) {
    fail(ErrorCode::dimension_mismatch, "rotate_to_uncoupled needs two modes of equal dimension, got " +
                                            in.describe());
  }
  const auto d = static_cast<Eigen::Index>(in.mode(0).dim);
  const Eigen::Index D = 2 * d - 1;
  Matrix padded = Matrix::Zero(D * D, D * D);
  for (Eigen::Index i1 = 0; i1 < d; ++i1)
    for (Eigen::Index i2 = 0; i2 < d; ++i2)
      for (Eigen::Index j1 = 0; j1 < d; ++j1)
        for (Eigen::Index j2 = 0; j2 < d; ++j2)
          padded(i1 * D + i2, j1 * D + j2) = rho_mech.matrix()(i1 * d + i2, j1 * d + j2);
  const SparseMatrix U = beam_splitter_matrix(theta, static_cast<std::size_t>(D));
  Matrix left = U * padded;
  Matrix rotated = (U * left.adjoint()).adjoint();
  rotated = 0.5 * (rotated + rotated.adjoint());
  ModeLayout out({{"b1", static_cast<std::size_t>(D)}, {"b2", static_cast<std::size_t>(D)}});
  return DensityMatrix(Operator(std::move(out), std::move(rotated)), StateTolerances::relaxed());
}

double negativity(const DensityMatrix& rho) {
  const Operator pt = partial_transpose(rho, rho.layout().mode(1).label);
  const Matrix h = 0.5 * (pt.matrix() + pt.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  double n = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    n += 0.5 * (std::abs(e) - e);
  }
  return n;
}

double purity(const DensityMatrix& rho) {
  return rho.matrix().cwiseAbs2().sum();
}

double mean_occupation(const DensityMatrix& rho) {
  if (rho.layout().size() != 1) fail(ErrorCode::dimension_mismatch, "mean_occupation needs a single-mode state");
  double n = 0.0;
  for (Eigen::Index k = 0; k < rho.dim(); ++k) n += static_cast<double>(k) * rho.matrix()(k, k).real();
  return n;
}

WignerGrid WignerGrid::for_state(const DensityMatrix& rho) {
  WignerGrid g;
  g.extent = std::max(6.0, 3.0 * std::sqrt(2.0 * mean_occupation(rho) + 1.0));
  g.n_points = 129;
  return g;
}

namespace {

double trapezoid_2d(const RealMatrix& f, double h) {
  const Eigen::Index n = f.rows();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      s += wi * wj * f(i, j);
    }
  }
  return s * h * h;
}

}  // namespace

WignerFunction wigner(const DensityMatrix& rho_single, const WignerGrid& grid) {
  if (rho_single.layout().size() != 1) fail(ErrorCode::dimension_mismatch, "wigner needs a single-mode state");
  if (grid.n_points < 3 || !(grid.extent > 0.0)) fail(ErrorCode::validation, "invalid Wigner grid");
  const int d = static_cast<int>(rho_single.dim());
  const Matrix& rho = rho_single.matrix();

  // sqrt(n!/m!) for m >= n, and the generalized Laguerre table lag(k, n) = L_n^{(k)}(x).
  RealMatrix norm(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n <= m; ++n) norm(m, n) = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
  RealMatrix lag(d, d);

  WignerFunction w;
  w.grid = grid;
  w.values.resize(grid.n_points, grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double q = grid.coordinate(i);
    for (int j = 0; j < grid.n_points; ++j) {
      const double p = grid.coordinate(j);
      const cplx beta = std::sqrt(2.0) * cplx(q, p);
      const double x = std::norm(beta);
      const double gauss = std::exp(-0.5 * x);
      for (int k = 0; k < d; ++k) {
        lag(k, 0) = 1.0;
        if (d > 1) lag(k, 1) = 1.0 + k - x;
        for (int n = 1; n + 1 < d - k; ++n) {
          lag(k, n + 1) = ((2.0 * n + 1.0 + k - x) * lag(k, n) - (n + k) * lag(k, n - 1)) / (n + 1.0);
        }
      }
      double diag = 0.0;
      cplx off = 0.0;
      cplx beta_pow = 1.0;  // beta^{m - n}
      for (int s = 0; s < d; ++s, beta_pow *= beta) {
        for (int n = 0; n + s < d; ++n) {
          const int m = n + s;
          const double sign = (n % 2 == 0) ? 1.0 : -1.0;
          const double amp = norm(m, n) * gauss * lag(s, n) * sign;
          if (s == 0) {
            diag += rho(n, n).real() * amp;
          } else {
            off += rho(n, m) * amp * beta_pow;
          }
        }
      }
      w.values(i, j) = (diag + 2.0 * off.real()) / pi;
    }
  }
  const double h = grid.spacing();
  w.integral = trapezoid_2d(w.values, h);
  w.abs_integral = trapezoid_2d(w.values.cwiseAbs(), h);
  const Eigen::Index last = grid.n_points - 1;
  w.boundary_max = std::max({w.values.row(0).cwiseAbs().maxCoeff(), w.values.row(last).cwiseAbs().maxCoeff(),
                             w.values.col(0).cwiseAbs().maxCoeff(), w.values.col(last).cwiseAbs().maxCoeff()});
  if (w.boundary_max > 1e-8) {
    fail(ErrorCode::grid_too_small, "Wigner function reaches " + format_number(w.boundary_max) +
                                        " on the boundary of [-" + format_number(grid.extent) + ", " +
                                        format_number(grid.extent) + "]^2");
  }
  if (std::abs(w.integral - 1.0) > 1e-3) {
    fail(ErrorCode::grid_too_small, "Wigner quadrature integrates to " + format_number(w.integral) +
                                        " with " + std::to_string(grid.n_points) + " points");
  }
  return w;
}

double wln(const WignerFunction& w, LogBase base) {
  const double v = std::max(w.abs_integral, 1.0);
  return base == LogBase::two ? std::log2(v) : std::log(v);
}

double wln(const DensityMatrix& rho_single, const WignerGrid& grid, LogBase base) {
  return wln(wigner(rho_single, grid), base);
}

void write_wigner_csv(const std::filesystem::path& path, const WignerFunction& w) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  os << "# units: q[1],p[1],W[1]\nq[1],p[1],W[1]\n";
  for (int i = 0; i < w.grid.n_points; ++i)
    for (int j = 0; j < w.grid.n_points; ++j)
      os << format_number(w.grid.coordinate(i)) << ',' << format_number(w.grid.coordinate(j)) << ','
         << format_number(w.values(i, j)) << '\n';
  if (!os) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

}  // namespace phonon_forge
