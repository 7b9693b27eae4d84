#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phonon_forge/operator.hpp"

namespace phonon_forge {

/// IR: each normal mode has its own cavity. SR: one cavity shared by both
/// normal modes.
enum class Scenario { individual, shared };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Physical parameters in units omega_m = 1. The first block is user input;
/// eta, omega_drive and delta are filled by calibrate().
struct ModelParams {
  double omega_m = 1.0;
  double theta = pi / 4;
  std::array<int, 2> targets{1, 1};
  double chi_bar = 1e-3;
  std::array<double, 2> kappa{1e-3, 1e-3};
  std::array<double, 2> gamma{0.0, 0.0};
  std::array<double, 2> nbar{0.0, 0.0};
  Scenario scenario = Scenario::individual;
  int d_m = 0;  ///< 0 selects max(M1, M2) + 3
  int d_c = 2;
  /// Coupling used for an M = 0 cell, which is left undriven.
  double eta_free = 1.0;
  /// Replaces the k = 0 scalarization of the drive amplitudes.
  std::optional<std::array<double, 2>> omega_drive_override;

  std::array<double, 2> eta{0.0, 0.0};
  std::array<double, 2> omega_drive{0.0, 0.0};
  std::array<double, 2> delta{0.0, 0.0};
  bool calibrated = false;
  std::vector<std::string> warnings;

  double g(int cell) const { return eta[cell] * omega_m; }
  int phonon_dim() const;
};

/// Fills eta, omega_drive, delta and checks the regime inequalities:
///   weak drive    Omega_n < 0.1 omega_m             (error)
///   blockade      kappa_n < g_n eta_n               (error)
///                 kappa_n < 0.1 g_n eta_n           (warning)
///   sideband      kappa_n < 0.1 omega_m             (warning)
///   truncation    d_m >= M_n + 3                    (error)
ModelParams calibrate(ModelParams params);

/// Temperature in units of omega_m that yields Bose occupation nbar at
/// frequency omega_m; 0 for nbar = 0.
double temperature_for_occupation(double nbar);

struct LindbladTerm {
  double rate = 0.0;  ///< full prefactor multiplying D[jump]
  Operator jump;
  std::string name;
};

/// Diagonal chi_k = eta Omega e^{-eta^2/2} L_k^{(1)}(eta^2) / (k + 1).
Operator chi_operator(double eta, double omega_drive, std::size_t d_m);

/// Cell-major layouts. Labels: IR "a1","B1","a2","B2"; SR "a","B1","B2";
/// single cell n: "a<n>","B<n>".
ModeLayout effective_layout(const ModelParams& params);
ModeLayout cell_layout(const ModelParams& params, int cell, int photon_dim = 2);

/// sum_n sigma_-^(n) chi^(n) B_n + h.c. over the cells present in `layout`.
Operator build_effective_hamiltonian(const ModelParams& params, const ModeLayout& layout);

/// sum_n -Delta_n a^dag a + omega_m B^dag B - g_n a^dag a (B^dag + B) + Omega_n (a^dag + a)
/// for the cells present in `layout` (IR only). Photon dims must be >= 3.
Operator build_full_hamiltonian(const ModelParams& params, const ModeLayout& layout);

/// Dressed dissipators for the cells present in `layout`.
std::vector<LindbladTerm> build_dissipators(const ModelParams& params, const ModeLayout& layout);

/// Initial mechanical state for one phonon mode.
struct MechanicalState {
  std::string label;
  Matrix rho;  ///< d_m x d_m (or smaller; zero-padded)

  static MechanicalState fock(std::string label, std::size_t n);
  static MechanicalState from_amplitudes(std::string label, const Vector& psi);
};

/// Vacuum photons tensored with the given mechanical states (vacuum where
/// unspecified). Support above the target M_n throws constraint_violation
/// unless allow_unsafe is set.
DensityMatrix initial_state(const ModelParams& params, const ModeLayout& layout,
                            const std::vector<MechanicalState>& mech = {},
                            bool allow_unsafe = false);

/// Cell index (0 or 1) targeted by a phonon label ("B1" -> 0, "B2" -> 1).
int cell_of_phonon_label(const std::string& label);

}  // namespace phonon_forge
