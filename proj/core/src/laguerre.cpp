#include "phonon_forge/laguerre.hpp"

#include <cmath>

#include "phonon_forge/error.hpp"

namespace phonon_forge {

double assoc_laguerre(int n, double alpha, double x) {
  if (n < 0) fail(ErrorCode::validation, "Laguerre degree must be non-negative");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double eta_for_target(int M) {
  if (M < 0) fail(ErrorCode::validation, "target Fock level must be non-negative");
  if (M == 0) fail(ErrorCode::no_root, "L_0^(1) = 1 has no zero; an M = 0 target needs no calibration");

  // L_M^(1)(0) = M + 1 > 0. March until the first sign change; the step is a
  // small fraction of the smallest-zero scale ~ 15 / (4M + 4).
  const double step = 1.0 / (200.0 * (M + 1));
  double lo = 0.0;
  double f_lo = assoc_laguerre(M, 1.0, lo);
  double hi = step;
  double f_hi = assoc_laguerre(M, 1.0, hi);
  while (f_lo * f_hi > 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi += step;
    f_hi = assoc_laguerre(M, 1.0, hi);
    if (hi > 4.0 * M + 10.0) fail(ErrorCode::no_root, "no sign change found for L_M^(1)");
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = assoc_laguerre(M, 1.0, mid);
    if (f_mid == 0.0) return std::sqrt(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  return std::sqrt(x);
}

}  // namespace phonon_forge
