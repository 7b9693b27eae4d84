#include <algorithm>
#include <cmath>
#include <functional>

#include <doctest.h>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/laguerre.hpp"
#include "phonon_forge/model.hpp"

using namespace phonon_forge;

namespace {

ModelParams calibrated(int m1, int m2, Scenario s = Scenario::individual) {
  ModelParams p;
  p.targets = {m1, m2};
  p.scenario = s;
  return calibrate(p);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("calibration follows the sideband and slicing conditions") {
  const ModelParams p = calibrated(3, 5);
  for (int n = 0; n < 2; ++n) {
    const double eta = eta_for_target(p.targets[n]);
    CHECK(p.eta[n] == doctest::Approx(eta));
    CHECK(p.omega_drive[n] == doctest::Approx(p.chi_bar * std::exp(0.5 * eta * eta) / eta));
    CHECK(p.delta[n] + p.g(n) * p.eta[n] == doctest::Approx(p.omega_m));
  }
  CHECK(p.phonon_dim() == 8);
  CHECK(p.calibrated);
}

TEST_CASE("chi vanishes at the target and equals chi_bar at k = 0") {
  const ModelParams p = calibrated(4, 4);
  const Matrix chi = chi_operator(p.eta[0], p.omega_drive[0], 7).matrix();
  CHECK(chi(0, 0).real() == doctest::Approx(p.chi_bar));
  CHECK(std::abs(chi(4, 4)) < 1e-15);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(chi(k, k)) > 1e-6);
}

TEST_CASE("calibration guards") {
  ModelParams p;
  p.targets = {2, 2};
  p.chi_bar = 1.0;
  CHECK(code_of([&] { calibrate(p); }) == ErrorCode::calibration);

  p = ModelParams{};
  p.kappa = {3.0, 3.0};
  CHECK(code_of([&] { calibrate(p); }) == ErrorCode::calibration);

  p = ModelParams{};
  p.targets = {3, 3};
  p.d_m = 5;
  CHECK(code_of([&] { calibrate(p); }) == ErrorCode::calibration);

  p = ModelParams{};
  p.gamma = {-1.0, 0.0};
  CHECK(code_of([&] { calibrate(p); }) == ErrorCode::validation);

  p = ModelParams{};
  p.targets = {1, 1};
  p.kappa = {0.5, 0.5};
  const ModelParams w = calibrate(p);
  CHECK_FALSE(w.warnings.empty());
}

TEST_CASE("an M = 0 cell is undriven") {
  const ModelParams p = calibrated(0, 2);
  CHECK(p.omega_drive[0] == 0.0);
  CHECK(p.eta[0] == p.eta_free);
}

TEST_CASE("effective Hamiltonian matrix elements") {
  const int M = 3;
  const ModelParams p = calibrated(M, M);
  const ModeLayout l = cell_layout(p, 0);
  const Operator h = build_effective_hamiltonian(p, l);
  CHECK(h.hermiticity_defect() < 1e-18);
  const auto d = static_cast<Eigen::Index>(p.phonon_dim());
  auto idx = [d](int photon, int phonon) { return photon * d + phonon; };
  const Matrix chi = chi_operator(p.eta[0], p.omega_drive[0], static_cast<std::size_t>(d)).matrix();
  CHECK(h.matrix()(idx(1, M), idx(0, M - 1)).real() == doctest::Approx(chi(M - 1, M - 1).real() * std::sqrt(M)));
  CHECK(std::abs(h.matrix()(idx(1, M + 1), idx(0, M))) < 1e-18);
  // The target state is dark.
  const Vector dark = kron(fock_ket(2, 0), fock_ket(static_cast<std::size_t>(d), M));
  CHECK((h.matrix() * dark).norm() < 1e-18);
  CHECK_THROWS_AS(build_effective_hamiltonian(p, cell_layout(p, 0, 3)), Error);
}

TEST_CASE("effective Hamiltonian commutes with the excitation number") {
  const ModelParams p = calibrated(2, 3, Scenario::shared);
  const ModeLayout l = effective_layout(p);
  CHECK(l.describe() == "a:2,B1:6,B2:6");
  const Operator h = build_effective_hamiltonian(p, l);
  const Operator n = embed(number(2), l, "a") * cplx(-1.0) + embed(number(6), l, "B1") + embed(number(6), l, "B2");
  CHECK(commutator(h, n).matrix().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dissipator bookkeeping") {
  ModelParams p;
  p.targets = {2, 2};
  CHECK(build_dissipators(calibrate(p), effective_layout(calibrate(p))).size() == 2);
  p.gamma = {1e-6, 1e-6};
  CHECK(build_dissipators(calibrate(p), effective_layout(calibrate(p))).size() == 4);
  p.nbar = {0.3, 0.3};
  const ModelParams q = calibrate(p);
  const auto ir = build_dissipators(q, effective_layout(q));
  CHECK(ir.size() == 8);
  p.scenario = Scenario::shared;
  const ModelParams s = calibrate(p);
  CHECK(build_dissipators(s, effective_layout(s)).size() == 7);

  CHECK(temperature_for_occupation(0.3) == doctest::Approx(0.6821).epsilon(1e-4));
  CHECK(temperature_for_occupation(0.0) == 0.0);
  const auto it = std::find_if(ir.begin(), ir.end(), [](const LindbladTerm& t) { return t.name == "dressed_dephasing_1"; });
  REQUIRE(it != ir.end());
  CHECK(it->rate == doctest::Approx(4.0 * q.eta[0] * q.eta[0] * 1e-6 * temperature_for_occupation(0.3)));
}

TEST_CASE("initial state safety") {
  const ModelParams p = calibrated(2, 2);
  const ModeLayout l = effective_layout(p);
  const DensityMatrix vac = initial_state(p, l);
  CHECK(vac.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(code_of([&] { initial_state(p, l, {MechanicalState::fock("B1", 3)}); }) == ErrorCode::constraint_violation);
  CHECK_NOTHROW(initial_state(p, l, {MechanicalState::fock("B1", 3)}, true));
  CHECK(code_of([&] { initial_state(p, l, {MechanicalState::fock("B3", 0)}); }) == ErrorCode::unknown_label);
}

TEST_CASE("full Hamiltonian needs a multi-level cavity") {
  ModelParams p;
  p.targets = {1, 1};
  p.d_m = 10;
  p = calibrate(p);
  CHECK_THROWS_AS(build_full_hamiltonian(p, cell_layout(p, 0, 2)), Error);
  const Operator h = build_full_hamiltonian(p, cell_layout(p, 0, 3));
  CHECK(h.hermiticity_defect() < 1e-15);
  CHECK(h.dim() == 30);
}
