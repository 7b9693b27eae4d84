#pragma once

namespace phonon_forge {

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term
/// recurrence (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}.
double assoc_laguerre(int n, double alpha, double x);

/// L_n^{(1)}(x), the polynomial family entering the operator-valued coupling.
inline double laguerre_assoc(int n, double x) { return assoc_laguerre(n, 1.0, x); }

/// Smallest positive root x of L_M^{(1)}(x); returns eta = sqrt(x).
/// Throws ErrorCode::no_root for M = 0 (L_0^{(1)} = 1).
double eta_for_target(int M);

}  // namespace phonon_forge
