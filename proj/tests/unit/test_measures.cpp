#include <cmath>
#include <random>

#include <doctest.h>

#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/measures.hpp"

using namespace phonon_forge;

namespace {

DensityMatrix fock_state(std::size_t d, std::size_t n) { return DensityMatrix::pure(ModeLayout::single("b", d), fock_ket(d, n)); }

/// (1/pi) Tr[rho D(alpha) P D(alpha)^dagger] built from dense displacement
/// operators in a generous truncation.
double wigner_by_parity(const Matrix& rho_small, double q, double p) {
  const std::size_t big = 60;
  Matrix rho = Matrix::Zero(big, big);
  rho.topLeftCorner(rho_small.rows(), rho_small.cols()) = rho_small;
  const cplx alpha = cplx(q, p) / std::sqrt(2.0);
  const Matrix D = displacement(alpha, big).matrix();
  Matrix parity = Matrix::Zero(big, big);
  for (std::size_t n = 0; n < big; ++n) parity(n, n) = (n % 2 ? -1.0 : 1.0);
  return (rho * D * parity * D.adjoint()).trace().real() / pi;
}

/// int |W_1| over the plane with W_1 = (2 r^2 - 1) e^{-r^2} / pi, radial Simpson.
double fock1_abs_integral() {
  const int n = 200000;
  const double r_max = 12.0;
  const double h = r_max / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double f = 2.0 * r * std::abs(2.0 * r * r - 1.0) * std::exp(-r * r);
    s += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("negativity oracles") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const ModeLayout l({{"b1", 3}, {"b2", 3}});
  for (int i = 0; i < 20; ++i) {
    const double th = u(rng);
    const Vector psi = std::cos(th) * kron(fock_ket(3, 1), fock_ket(3, 0)) + std::sin(th) * kron(fock_ket(3, 0), fock_ket(3, 1));
    CHECK(std::abs(negativity(DensityMatrix::pure(l, psi)) - std::abs(std::sin(th) * std::cos(th))) < 1e-8);
  }
  CHECK(negativity(DensityMatrix::pure(l, kron(fock_ket(3, 2), fock_ket(3, 1)))) < 1e-14);
  const Matrix mixed = Matrix::Identity(9, 9) / 9.0;
  CHECK(negativity(DensityMatrix(l, mixed)) < 1e-14);
  CHECK(purity(DensityMatrix(l, mixed)) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("rotation to the uncoupled basis") {
  const ModeLayout l({{"B1", 3}, {"B2", 3}});
  const double th = 0.4;
  const DensityMatrix one_zero = DensityMatrix::pure(l, kron(fock_ket(3, 1), fock_ket(3, 0)));
  const DensityMatrix rot = rotate_to_uncoupled(one_zero, th);
  CHECK(rot.layout().describe() == "b1:5,b2:5");
  CHECK(negativity(rot) == doctest::Approx(std::abs(std::sin(th) * std::cos(th))));
  // |1,1> at pi/4 maps to (|2,0> - |0,2>)/sqrt(2).
  const DensityMatrix one_one = DensityMatrix::pure(l, kron(fock_ket(3, 1), fock_ket(3, 1)));
  const DensityMatrix r11 = rotate_to_uncoupled(one_one, pi / 4);
  CHECK(negativity(r11) == doctest::Approx(0.5));
  CHECK(purity(r11) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rotate_to_uncoupled(DensityMatrix(ModeLayout({{"x", 2}, {"y", 3}}), Matrix::Identity(6, 6) / 6.0), th),
                  Error);
}

TEST_CASE("Wigner function values") {
  WignerGrid g;
  const WignerFunction vac = wigner(fock_state(4, 0), g);
  for (int i = 0; i < g.n_points; i += 16)
    for (int j = 0; j < g.n_points; j += 16) {
      const double q = g.coordinate(i);
      const double p = g.coordinate(j);
      CHECK(vac.values(i, j) == doctest::Approx(std::exp(-q * q - p * p) / pi));
    }
  CHECK(vac.integral == doctest::Approx(1.0).epsilon(1e-6));
  const WignerFunction one = wigner(fock_state(4, 1), g);
  CHECK(one.values(64, 64) == doctest::Approx(-1.0 / pi));
}

TEST_CASE("Wigner function agrees with the displaced-parity route") {
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Matrix a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  WignerGrid g;
  g.extent = 8.0;
  g.n_points = 33;
  const WignerFunction w = wigner(DensityMatrix(ModeLayout::single("b", 4), rho), g);
  for (const int i : {11, 14, 16, 19, 21})
    for (const int j : {12, 15, 16, 20})
      CHECK(w.values(i, j) == doctest::Approx(wigner_by_parity(rho, g.coordinate(i), g.coordinate(j))).epsilon(1e-9));
}

TEST_CASE("Wigner logarithmic negativity") {
  const double exact = std::log(4.0 * std::exp(-0.5) - 1.0);
  CHECK(std::log(fock1_abs_integral()) == doctest::Approx(exact).epsilon(1e-8));
  const DensityMatrix one = fock_state(4, 1);
  const double w = wln(one, WignerGrid::for_state(one));
  CHECK(std::abs(w - exact) < 1e-2);
  CHECK(wln(one, WignerGrid::for_state(one), LogBase::two) == doctest::Approx(w / std::log(2.0)));
  CHECK(wln(fock_state(4, 0), WignerGrid{}) <= 1e-3);
  const DensityMatrix mixed(ModeLayout::single("b", 3), Matrix(Vector::Constant(3, 1.0 / 3.0).asDiagonal()));
  CHECK(mean_occupation(mixed) == doctest::Approx(1.0));
}

TEST_CASE("Wigner grid checks") {
  const DensityMatrix ten = fock_state(12, 10);
  const WignerGrid auto_grid = WignerGrid::for_state(ten);
  CHECK(auto_grid.extent == doctest::Approx(3.0 * std::sqrt(21.0)));
  CHECK(auto_grid.n_points == 129);
  WignerGrid small;
  small.extent = 3.0;
  try {
    wigner(ten, small);
    FAIL("expected grid_too_small");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_too_small);
  }
}
