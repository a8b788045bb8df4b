#pragma once

#include "dnpsim/spin_system.hpp"

#include <Eigen/Core>

namespace dnpsim::qme {

/// Largest spin count for the numerical elimination (4^N-side blocks).
inline constexpr std::size_t max_projection_spins = 4;

struct Projection {
  /// G(a, b): rate from configuration b to a (a != b); columns sum to zero.
  /// Configuration indices follow kmc::Configuration::index().
  Eigen::MatrixXd generator;
  double max_imaginary = 0.0;  // largest |Im| dropped from the Zeeman block
  double rcond = 0.0;          // reciprocal condition estimate of the inverted block
};

/// Numerical two-stage adiabatic elimination.
///
/// First the non-zero-quantum coherences are removed to second order in
/// 1/wI, giving L0 = M0 + M1/wI + M2/wI^2 on the zero-quantum space with
///
///   M0 = -i[H0] + Gamma
///   M1 = -i([H+][H-] - [H-][H+])
///   M2 = -[H+] X [H-] - [H-] X [H+],   X = i[H0] - Gamma
///
/// ([O] is the commutator superoperator). Then the zero-quantum coherences
/// between distinct configurations are eliminated exactly by the Schur
/// complement L_Z = L11 - L12 L22^-1 L21 over the populations.
///
/// Throws CapacityError beyond 4 spins and EliminationError when the
/// coherence block is singular.
Projection adiabatic_project(const PhysicalParams& p, const Couplings& c);

/// max over entries of |a - b| / max(|b|, floor), taken where a or b is
/// nonzero. Throws SpecError on a dimension mismatch.
double compare_generators(const Eigen::MatrixXd& numeric, const Eigen::MatrixXd& analytic, double floor);

}  // namespace dnpsim::qme
