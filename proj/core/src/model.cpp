#include "phonon_forge/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonon_forge/error.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/laguerre.hpp"

namespace phonon_forge {

std::string to_string(Scenario s) { return s == Scenario::individual ? "IR" : "SR"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "IR" || s == "ir" || s == "individual") return Scenario::individual;
  if (s == "SR" || s == "sr" || s == "shared") return Scenario::shared;
  fail(ErrorCode::config, "unknown scenario '" + s + "' (expected IR or SR)");
}

int ModelParams::phonon_dim() const {
  return d_m > 0 ? d_m : std::max(targets[0], targets[1]) + 3;
}

double temperature_for_occupation(double nbar) {
  if (nbar < 0.0) fail(ErrorCode::validation, "thermal occupation must be non-negative");
  if (nbar == 0.0) return 0.0;
  return 1.0 / std::log1p(1.0 / nbar);
}

ModelParams calibrate(ModelParams p) {
  std::ostringstream bad;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) bad << (bad.tellp() > 0 ? "; " : "") << what;
  };
  check(p.omega_m > 0.0, "omega_m > 0");
  check(p.chi_bar > 0.0, "chi_bar > 0");
  check(p.d_c >= 2, "d_c >= 2");
  for (int n = 0; n < 2; ++n) {
    const std::string c = std::to_string(n + 1);
    check(p.targets[n] >= 0, "M_" + c + " >= 0");
    check(p.kappa[n] >= 0.0, "kappa_" + c + " >= 0");
    check(p.gamma[n] >= 0.0, "gamma_" + c + " >= 0");
    check(p.nbar[n] >= 0.0, "nbar_" + c + " >= 0");
  }
  if (bad.tellp() > 0) fail(ErrorCode::validation, "invalid parameters: " + bad.str());

  p.warnings.clear();
  const int dm = p.phonon_dim();
  for (int n = 0; n < 2; ++n) {
    const std::string c = std::to_string(n + 1);
    const int M = p.targets[n];
    if (M > 0) {
      p.eta[n] = eta_for_target(M);
      p.omega_drive[n] = p.chi_bar * std::exp(0.5 * p.eta[n] * p.eta[n]) / p.eta[n];
    } else {
      p.eta[n] = p.eta_free;
      p.omega_drive[n] = 0.0;
    }
    if (p.omega_drive_override) p.omega_drive[n] = (*p.omega_drive_override)[n];
    // Blue sideband: Delta + g eta = omega_m with g = eta omega_m.
    p.delta[n] = p.omega_m - p.eta[n] * p.eta[n] * p.omega_m;

    const double g_eta = p.g(n) * p.eta[n];
    std::ostringstream v;
    v.precision(6);
    v << "Omega_" << c << " = " << p.omega_drive[n] << " < 0.1 omega_m";
    check(p.omega_drive[n] < 0.1 * p.omega_m, v.str());
    v.str("");
    v << "kappa_" << c << " = " << p.kappa[n] << " < g_" << c << " eta_" << c << " = " << g_eta;
    check(p.kappa[n] < g_eta, v.str());
    check(dm >= M + 3, "d_m = " + std::to_string(dm) + " >= M_" + c + " + 3 = " + std::to_string(M + 3));
    if (p.kappa[n] >= 0.1 * g_eta) {
      p.warnings.push_back("photon blockade marginal: kappa_" + c + " >= 0.1 g_" + c + " eta_" + c);
    }
    if (p.kappa[n] >= 0.1 * p.omega_m) {
      p.warnings.push_back("resolved sideband marginal: kappa_" + c + " >= 0.1 omega_m");
    }
  }
  if (bad.tellp() > 0) fail(ErrorCode::calibration, "calibration failed: " + bad.str());
  p.calibrated = true;
  return p;
}

Operator chi_operator(double eta, double omega_drive, std::size_t d_m) {
  if (d_m < 2) fail(ErrorCode::invalid_dimension, "phonon truncation must be at least 2");
  const auto d = static_cast<Eigen::Index>(d_m);
  const double prefactor = eta * omega_drive * std::exp(-0.5 * eta * eta);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m(k, k) = prefactor * laguerre_assoc(static_cast<int>(k), eta * eta) / static_cast<double>(k + 1);
  }
  return {ModeLayout::single(kSingleModeLabel, d_m), std::move(m)};
}

ModeLayout effective_layout(const ModelParams& params) {
  const auto dm = static_cast<std::size_t>(params.phonon_dim());
  if (params.scenario == Scenario::shared) {
    return ModeLayout({{"a", 2}, {"B1", dm}, {"B2", dm}});
  }
  return ModeLayout({{"a1", 2}, {"B1", dm}, {"a2", 2}, {"B2", dm}});
}

ModeLayout cell_layout(const ModelParams& params, int cell, int photon_dim) {
  if (cell != 0 && cell != 1) fail(ErrorCode::validation, "cell index must be 0 or 1");
  const std::string c = std::to_string(cell + 1);
  return ModeLayout({{"a" + c, static_cast<std::size_t>(photon_dim)},
                     {"B" + c, static_cast<std::size_t>(params.phonon_dim())}});
}

int cell_of_phonon_label(const std::string& label) {
  if (label == "B1") return 0;
  if (label == "B2") return 1;
  fail(ErrorCode::unknown_label, "'" + label + "' is not a normal-mode label (B1 or B2)");
}

namespace {

struct CellSlot {
  int cell;
  std::string photon;
  std::string phonon;
};

std::vector<CellSlot> cells_in(const ModeLayout& layout) {
  std::vector<CellSlot> out;
  for (int n = 0; n < 2; ++n) {
    const std::string c = std::to_string(n + 1);
    if (!layout.contains("B" + c)) continue;
    if (layout.contains("a" + c)) {
      out.push_back({n, "a" + c, "B" + c});
    } else if (layout.contains("a")) {
      out.push_back({n, "a", "B" + c});
    } else {
      fail(ErrorCode::dimension_mismatch, "no photon mode for B" + c + " in layout " + layout.describe());
    }
  }
  if (out.empty()) fail(ErrorCode::dimension_mismatch, "layout " + layout.describe() + " has no normal modes");
  return out;
}

void require_calibrated(const ModelParams& p) {
  if (!p.calibrated) fail(ErrorCode::validation, "parameters must be calibrated first");
}

}  // namespace

Operator build_effective_hamiltonian(const ModelParams& params, const ModeLayout& layout) {
  require_calibrated(params);
  Operator h = Operator::zero(layout);
  for (const auto& slot : cells_in(layout)) {
    const auto& photon = layout.mode(slot.photon);
    const auto& phonon = layout.mode(slot.phonon);
    if (photon.dim != 2) {
      fail(ErrorCode::dimension_mismatch, "effective model needs a two-level photon, '" + slot.photon + "' has " +
                                              std::to_string(photon.dim) + " levels");
    }
    const Operator sigma_minus = embed(destroy(2), layout, slot.photon);
    const Operator b = embed(destroy(phonon.dim), layout, slot.phonon);
    const Operator chi =
        embed(chi_operator(params.eta[slot.cell], params.omega_drive[slot.cell], phonon.dim), layout, slot.phonon);
    const Operator term = sigma_minus * chi * b;
    h += term + term.adjoint();
  }
  return h;
}

Operator build_full_hamiltonian(const ModelParams& params, const ModeLayout& layout) {
  require_calibrated(params);
  Operator h = Operator::zero(layout);
  for (const auto& slot : cells_in(layout)) {
    if (slot.photon == "a") fail(ErrorCode::validation, "full model is defined for individual cavities only");
    const auto& photon = layout.mode(slot.photon);
    const auto& phonon = layout.mode(slot.phonon);
    if (photon.dim < 3) {
      fail(ErrorCode::invalid_dimension, "full model needs at least 3 photon levels, '" + slot.photon + "' has " +
                                             std::to_string(photon.dim));
    }
    const int n = slot.cell;
    const Operator a = embed(destroy(photon.dim), layout, slot.photon);
    const Operator b = embed(destroy(phonon.dim), layout, slot.phonon);
    const Operator na = a.adjoint() * a;
    h += na * cplx(-params.delta[n]);
    h += (b.adjoint() * b) * cplx(params.omega_m);
    h -= na * (b.adjoint() + b) * cplx(params.g(n));
    h += (a.adjoint() + a) * cplx(params.omega_drive[n]);
  }
  return h;
}

std::vector<LindbladTerm> build_dissipators(const ModelParams& params, const ModeLayout& layout) {
  require_calibrated(params);
  std::vector<LindbladTerm> terms;
  auto push = [&](double rate, Operator jump, std::string name) {
    if (rate < 0.0) fail(ErrorCode::validation, "negative rate for " + name);
    if (rate > 0.0) terms.push_back({rate, std::move(jump), std::move(name)});
  };
  bool shared_photon_done = false;
  for (const auto& slot : cells_in(layout)) {
    const int n = slot.cell;
    const std::string c = std::to_string(n + 1);
    const auto& photon = layout.mode(slot.photon);
    const auto& phonon = layout.mode(slot.phonon);
    const Operator a = embed(destroy(photon.dim), layout, slot.photon);
    const Operator b = embed(destroy(phonon.dim), layout, slot.phonon);
    const Operator na = a.adjoint() * a;
    const double eta = params.eta[n];
    const double gamma = params.gamma[n];
    const double nbar = params.nbar[n];

    if (slot.photon != "a" || !shared_photon_done) {
      push(params.kappa[n] / 2.0, a, "photon_decay_" + slot.photon);
      shared_photon_done = shared_photon_done || slot.photon == "a";
    }
    push(gamma * (1.0 + nbar) / 2.0, b - na * cplx(eta), "phonon_damping_" + c);
    push(gamma * nbar / 2.0, b.adjoint() - na * cplx(eta), "phonon_heating_" + c);
    push(temperature_for_occupation(nbar) * 4.0 * eta * eta * gamma, na, "dressed_dephasing_" + c);
  }
  return terms;
}

MechanicalState MechanicalState::fock(std::string label, std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n + 1);
  Matrix rho = Matrix::Zero(d, d);
  rho(d - 1, d - 1) = 1.0;
  return {std::move(label), std::move(rho)};
}

MechanicalState MechanicalState::from_amplitudes(std::string label, const Vector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) fail(ErrorCode::invalid_state, "zero amplitude vector");
  const Vector v = psi / norm;
  return {std::move(label), v * v.adjoint()};
}

DensityMatrix initial_state(const ModelParams& params, const ModeLayout& layout,
                            const std::vector<MechanicalState>& mech, bool allow_unsafe) {
  for (const auto& m : mech) {
    if (!layout.contains(m.label)) fail(ErrorCode::unknown_label, "no mode '" + m.label + "' in layout");
  }
  Matrix rho = Matrix::Ones(1, 1);
  for (const auto& mode : layout.modes()) {
    const auto d = static_cast<Eigen::Index>(mode.dim);
    Matrix block = Matrix::Zero(d, d);
    auto it = std::find_if(mech.begin(), mech.end(), [&](const MechanicalState& m) { return m.label == mode.label; });
    if (it == mech.end()) {
      block(0, 0) = 1.0;
    } else {
      const Matrix& given = it->rho;
      if (given.rows() != given.cols() || given.rows() > d) {
        fail(ErrorCode::dimension_mismatch, "mechanical state for '" + mode.label + "' does not fit the truncation");
      }
      const int limit = params.targets[cell_of_phonon_label(mode.label)];
      for (Eigen::Index i = 0; i < given.rows(); ++i)
        for (Eigen::Index j = 0; j < given.cols(); ++j)
          if (std::abs(given(i, j)) > 1e-14 && (i > limit || j > limit) && !allow_unsafe) {
            fail(ErrorCode::constraint_violation, "initial state of '" + mode.label + "' has support on |" +
                                                      std::to_string(std::max(i, j)) + "> above the target M = " +
                                                      std::to_string(limit));
          }
      block.topLeftCorner(given.rows(), given.cols()) = given;
    }
    rho = kron(rho, block);
  }
  return DensityMatrix(Operator(layout, std::move(rho)));
}

}  // namespace phonon_forge
