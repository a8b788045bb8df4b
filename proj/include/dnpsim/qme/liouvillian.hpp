#pragma once

#include "dnpsim/qme/operators.hpp"
#include "dnpsim/series.hpp"
#include "dnpsim/spin_system.hpp"

#include <span>
#include <vector>

namespace dnpsim::qme {

/// H = H_Z + H_0 + H_+ + H_- for one electron (spin 0) and the nuclei.
///
///   H_Z = wI (S_z + sum_k I_kz)
///   H_0 = lambda S_z + sum_k A_k I_kz S_z + sum_{k<j} d_kj (3 I_kz I_jz - I_k.I_j)
///   H_+ = (w1/2) S_+ + (1/2) sum_k |B_k| I_k+ S_z,   H_- = H_+^dag
struct Hamiltonian {
  CMatrix HZ, H0, Hplus, Hminus;
  CMatrix total() const { return HZ + H0 + Hplus + Hminus; }
};

/// Throws CapacityError beyond 6 spins.
Hamiltonian build_hamiltonian(const PhysicalParams& p, const Couplings& c);

/// Longitudinal relaxation (with the thermal correction that drives the
/// electron to -P0) plus transverse dephasing:
///
///   R1S/2 [D(S+) + D(S-)] + P0 R1S/2 [D(S-) - D(S+)] + R1I/2 sum_k [D(I_k+) + D(I_k-)]
///   + 2 R2S D(S_z) + 2 R2I sum_k D(I_kz)
Superoperator build_relaxation(const PhysicalParams& p, std::size_t n_spins);

/// L = -i[H, .] + Gamma.
Superoperator build_liouvillian(const Hamiltonian& h, const Superoperator& relaxation);

/// Product state with per-spin polarization p_s = 2<s_z>.
CMatrix product_state(std::span<const double> polarization);

/// Electron at -P0, nuclei unpolarized.
CMatrix thermal_state(const PhysicalParams& p, std::size_t n_spins);

/// Unit-trace solution of L rho = 0 (assumes a unique stationary state).
CMatrix steady_state(const Superoperator& L);

/// Per-spin polarization 2 Re tr(s_z rho).
std::vector<double> polarizations(const CMatrix& rho);

enum class PropagationMethod {
  Spectral,     // eigendecomposition of L, any grid for the cost of one solve
  Exponential,  // step propagators exp(L dt), one per distinct interval
  RungeKutta,   // adaptive Dormand-Prince; only practical when wI is modest
};

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::Spectral;
  /// Spectral falls back to Exponential when the eigenvector matrix has a
  /// reciprocal condition number below this (near-defective L).
  double min_rcond = 1e-9;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  bool keep_states = false;
};

struct Propagation {
  PolarizationSeries series;      // deterministic: trajectories = 0, se = 0
  double max_trace_error = 0.0;   // max |tr rho - 1| over the grid
  double max_hermiticity_error = 0.0;  // max |rho - rho^dag|
  std::vector<CMatrix> states;    // when requested
  PropagationMethod used = PropagationMethod::Spectral;
};

/// Integrates d rho/dt = L rho on the grid. Throws PropagationError if the
/// integrator fails or the state becomes non-finite.
///
/// With wI ~ 1e9 s^-1 every double-precision method carries an absolute rate
/// error near 1e-16 wI, so trace and populations drift by about that times t;
/// max_trace_error reports it.
Propagation propagate(const Superoperator& L, const CMatrix& rho0, std::span<const double> t_grid,
                      const PropagationOptions& opts = {});

}  // namespace dnpsim::qme
