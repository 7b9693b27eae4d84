#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/model.hpp"

using namespace phonon_forge;

namespace {

Matrix random_state(Eigen::Index d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Liouvillian decay(std::size_t d, double kappa) {
  const ModeLayout l = ModeLayout::single("c", d);
  const Operator a(l, destroy(d).matrix());
  return build_liouvillian(Operator::zero(l), {{kappa / 2.0, a, "decay"}});
}

ModelParams cell_params(int M, double gamma) {
  ModelParams p;
  p.targets = {M, M};
  p.gamma = {gamma, gamma};
  return calibrate(p);
}

}  // namespace

TEST_CASE("column-stacking vectorization") {
  const Matrix a = random_state(3, 1);
  const Matrix b = random_state(3, 2);
  const Matrix rho = random_state(3, 3);
  CHECK(max_abs(unvec(vec(rho), 3) - rho) == 0.0);
  CHECK((vec(a * rho * b) - kron(b.transpose(), a) * vec(rho)).norm() < 1e-14);
  CHECK(std::string(Liouvillian::convention) == "column-stacking");
}

TEST_CASE("Liouvillian reproduces the master equation") {
  const ModeLayout l = ModeLayout::single("c", 4);
  const Matrix h = random_state(4, 4);
  const Matrix j = destroy(4).matrix() + 0.3 * number(4).matrix();
  const double r = 0.7;
  const Liouvillian L = build_liouvillian(Operator(l, h), {{r, Operator(l, j), "j"}});
  const Matrix rho = random_state(4, 5);
  const Matrix jdj = j.adjoint() * j;
  const Matrix expected = cplx(0, -1) * (h * rho - rho * h) + r * (2.0 * j * rho * j.adjoint() - rho * jdj - jdj * rho);
  CHECK(max_abs(L.apply(rho) - expected) < 1e-13);
  CHECK(std::abs(L.apply(rho).trace()) < 1e-13);
}

TEST_CASE("photon decay obeys d<n>/dt = -kappa <n>") {
  const double kappa = 0.05;
  const Liouvillian L = decay(6, kappa);
  const DensityMatrix rho0 = DensityMatrix::pure(L.layout(), fock_ket(6, 3));
  for (const auto method : {EvolveMethod::dopri5, EvolveMethod::propagator}) {
    EvolveOptions o;
    o.method = method;
    const Trajectory t = evolve(rho0, L, 40.0, 4.0, o);
    REQUIRE(t.times.size() == 11);
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      const double n = (number(6).matrix() * t.states[k].matrix()).trace().real();
      CHECK(n == doctest::Approx(3.0 * std::exp(-kappa * t.times[k])).epsilon(1e-7));
      CHECK(t.trace_errors[k] < 1e-10);
      CHECK(t.hermiticity_defects[k] < 1e-12);
    }
  }
}

TEST_CASE("integrator refuses an impossible step budget") {
  const Liouvillian L = decay(4, 1.0);
  EvolveOptions o;
  o.max_steps = 3;
  try {
    evolve(DensityMatrix::pure(L.layout(), fock_ket(4, 3)), L, 100.0, 100.0, o);
    FAIL("expected stiffness");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::stiffness);
  }
}

TEST_CASE("nullspace dimension") {
  CHECK(nullspace_dimension(decay(3, 1.0)) == 1);
  CHECK(nullspace_dimension(decay(3, 1.0), 1e-9, 0) == 1);
  const ModeLayout l = ModeLayout::single("c", 3);
  const Liouvillian idle = build_liouvillian(Operator::zero(l), {});
  CHECK(nullspace_dimension(idle) == 9);
  CHECK(nullspace_dimension(idle, 1e-9, 0) == 2);
}

TEST_CASE("nullspace dimension separates dark states from slow damping") {
  for (const Eigen::Index limit : {Eigen::Index{1024}, Eigen::Index{0}}) {
    const ModelParams dark = cell_params(1, 0.0);
    const ModeLayout l = cell_layout(dark, 0);
    CHECK(nullspace_dimension(build_liouvillian(build_effective_hamiltonian(dark, l), build_dissipators(dark, l)),
                              1e-13, limit) >= 2);
    const ModelParams damped = cell_params(2, 1e-8);
    const ModeLayout ld = cell_layout(damped, 0);
    CHECK(nullspace_dimension(build_liouvillian(build_effective_hamiltonian(damped, ld), build_dissipators(damped, ld)),
                              1e-13, limit) == 1);
  }
}

TEST_CASE("steady-state methods agree when the fixed point is unique") {
  const ModelParams p = cell_params(2, 1e-4);
  const ModeLayout l = cell_layout(p, 0);
  const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, l), build_dissipators(p, l));
  SteadyOptions o;
  o.method = SteadyMethod::nullspace;
  const SteadyState ns = steady_state(L, initial_state(p, l), o);
  CHECK(ns.nullspace_dim == 1);
  CHECK(ns.residual < 1e-12);
  o.method = SteadyMethod::time_marching;
  o.first_checkpoint = 1e4;
  const SteadyState tm = steady_state(L, initial_state(p, l), o);
  CHECK(tm.residual < 1e-10);
  CHECK(trace_distance(ns.rho, tm.rho) < 1e-5);
}

TEST_CASE("degenerate dynamics fall back to time marching and reach the dark state") {
  const int M = 2;
  const ModelParams p = cell_params(M, 0.0);
  const ModeLayout l = cell_layout(p, 0);
  const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, l), build_dissipators(p, l));
  const DensityMatrix dark = initial_state(p, l, {MechanicalState::fock("B1", M)});
  CHECK(L.residual(dark.matrix()) < 1e-10);
  SteadyOptions o;
  o.method = SteadyMethod::nullspace;
  const SteadyState ss = steady_state(L, initial_state(p, l), o);
  CHECK(ss.fell_back);
  CHECK(ss.nullspace_dim > 1);
  CHECK(ss.method_used == SteadyMethod::time_marching);
  const DensityMatrix phonon = partial_trace(ss.rho, {"B1"});
  CHECK(phonon.matrix()(M, M).real() > 0.98);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "phonon_forge_ckpt_test";
  std::filesystem::create_directories(dir);
  const ModeLayout l({{"a1", 2}, {"B1", 3}});
  const Checkpoint cp{l, 12.5, vec(random_state(6, 9))};
  write_checkpoint(dir / "x.pfck", cp);
  const Checkpoint back = read_checkpoint(dir / "x.pfck");
  CHECK(back.layout == l);
  CHECK(back.time == 12.5);
  CHECK((back.state - cp.state).norm() == 0.0);
  std::ofstream(dir / "bad.pfck") << "nope";
  CHECK_THROWS_AS(read_checkpoint(dir / "bad.pfck"), Error);
  std::filesystem::remove_all(dir);
}
