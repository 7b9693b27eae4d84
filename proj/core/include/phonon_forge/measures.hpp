#pragma once

#include <filesystem>
#include <string>

#include "phonon_forge/operator.hpp"

namespace phonon_forge {

/// Rotates a two-mode normal-mode state into the uncoupled basis,
/// rho_b = U rho_B U^dagger with U = beam_splitter_unitary(theta).
///
/// Each mode is first zero-padded to dimension 2d - 1 so every populated
/// total-number sector fits and the rotation is exact. The result lives on
/// the layout {b1: 2d-1, b2: 2d-1}.
DensityMatrix rotate_to_uncoupled(const DensityMatrix& rho_mech, double theta);

/// sum over eigenvalues e of the partial transpose of (|e| - e) / 2.
double negativity(const DensityMatrix& rho);

/// Tr[rho^2].
double purity(const DensityMatrix& rho);

/// Mean occupation <n> of a single-mode state.
double mean_occupation(const DensityMatrix& rho);

/// Square phase-space grid q, p in [-extent, extent].
struct WignerGrid {
  double extent = 6.0;
  int n_points = 129;

  double spacing() const { return 2.0 * extent / (n_points - 1); }
  double coordinate(int i) const { return -extent + i * spacing(); }

  /// L = max(6, 3 sqrt(2<n> + 1)), 129 points.
  static WignerGrid for_state(const DensityMatrix& rho);
};

struct WignerFunction {
  WignerGrid grid;
  RealMatrix values;     ///< values(i, j) = W(q_i, p_j)
  double integral = 0.0;  ///< trapezoid of W
  double abs_integral = 0.0;
  double boundary_max = 0.0;
};

/// W(q, p) = (1/pi) Tr[rho D(alpha) P D(alpha)^dagger], alpha = (q + i p)/sqrt(2),
/// P the parity. Convention: [q, p] = i, vacuum variance 1/2, integral 1.
/// Throws grid_too_small when |W| on the boundary exceeds 1e-8 or the
/// normalization misses 1 by more than 1e-3.
WignerFunction wigner(const DensityMatrix& rho_single, const WignerGrid& grid);

enum class LogBase { natural, two };

/// log of the trapezoid integral of |W|, clamped at 0 when the integral
/// falls below 1 by less than the quadrature tolerance.
double wln(const DensityMatrix& rho_single, const WignerGrid& grid, LogBase base = LogBase::natural);
double wln(const WignerFunction& w, LogBase base = LogBase::natural);

/// CSV triples q,p,W for plotting.
void write_wigner_csv(const std::filesystem::path& path, const WignerFunction& w);

}  // namespace phonon_forge
