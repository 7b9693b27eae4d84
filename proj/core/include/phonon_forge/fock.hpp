#pragma once

#include <string>
#include <vector>

#include "phonon_forge/operator.hpp"

namespace phonon_forge {

/// Label given to the single mode of operators built by the constructors
/// below; embed() ignores it.
inline constexpr const char* kSingleModeLabel = "mode";

Operator destroy(std::size_t dim);
Operator create(std::size_t dim);
Operator number(std::size_t dim);

/// Column vector of the Fock state |n> in a dim-level space.
Vector fock_ket(std::size_t dim, std::size_t n);

Matrix kron(const Matrix& a, const Matrix& b);

/// Scaling-and-squaring Pade exponential.
Matrix expm(const Matrix& m);

/// Places a single-mode operator in the slot of `target_label`, identities
/// elsewhere.
Operator embed(const Operator& op, const ModeLayout& layout, const std::string& target_label);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

/// Transposes the indices of one mode of a two-mode state.
Operator partial_transpose(const DensityMatrix& rho, const std::string& mode_label);

/// exp(alpha b^dagger - conj(alpha) b) in a dim-level truncation.
Operator displacement(cplx alpha, std::size_t dim);

/// Mode-mixing unitary U on two equal-dim modes with
///   U^dagger b1 U = cos(theta) b1 + sin(theta) b2
///   U^dagger b2 U = sin(theta) b1 - cos(theta) b2.
/// Built as the parity (-1)^{n2} times exp(theta (b1^dagger b2 - b2^dagger b1)).
/// Exactly unitary and number conserving in the truncated space; the mode
/// relations hold exactly on total-number sectors that fit in the truncation.
Operator beam_splitter_unitary(double theta, const ModeLayout& layout);

/// Sparse form of the same unitary for two modes of dimension `dim`.
SparseMatrix beam_splitter_matrix(double theta, std::size_t dim);

}  // namespace phonon_forge
