#include "dnpsim/qme/adiabatic.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/qme/liouvillian.hpp"

#include <Eigen/LU>

#include <cmath>
#include <vector>

namespace dnpsim::qme {

Projection adiabatic_project(const PhysicalParams& p, const Couplings& c) {
  const std::size_t N = c.n_nuclei() + 1;
  if (N > max_projection_spins) throw CapacityError("adiabatic projection supports at most 4 spins");
  const double wI = p.omegaI();
  if (!(wI > 0.0)) throw DomainError("adiabatic projection needs omegaI > 0");

  const Hamiltonian h = build_hamiltonian(p, c);
  const CMatrix gamma = build_relaxation(p, N).m;
  const CMatrix h0 = commutator(h.H0).m;
  const CMatrix hp = commutator(h.Hplus).m;
  const CMatrix hm = commutator(h.Hminus).m;
  const Complex i(0.0, 1.0);

  const CMatrix m0 = -i * h0 + gamma;
  const CMatrix m1 = -i * (hp * hm - hm * hp);
  const CMatrix x = i * h0 - gamma;
  const CMatrix m2 = -(hp * x * hm) - hm * x * hp;
  const CMatrix l0 = m0 + m1 / wI + m2 / (wI * wI);

  // Zeeman populations |a><a| versus zero-quantum coherences |a><b|, a != b.
  const SpinBasis basis(N);
  const std::size_t D = basis.dim();
  std::vector<Eigen::Index> zee, coh;
  for (std::size_t b = 0; b < D; ++b) {
    for (std::size_t a = 0; a < D; ++a) {
      if (basis.ups(a) != basis.ups(b)) continue;
      (a == b ? zee : coh).push_back(static_cast<Eigen::Index>(vec_index(a, b, D)));
    }
  }
  // zee is ordered by configuration index because vec_index(a, a) increases with a.

  const auto nz = static_cast<Eigen::Index>(zee.size());
  const auto nc = static_cast<Eigen::Index>(coh.size());
  CMatrix l11 = l0(zee, zee);

  Projection out;
  out.rcond = 1.0;
  if (nc > 0) {
    const CMatrix l12 = l0(zee, coh);
    const CMatrix l21 = l0(coh, zee);
    const CMatrix l22 = l0(coh, coh);
    Eigen::PartialPivLU<CMatrix> lu(l22);
    out.rcond = lu.rcond();
    if (!(out.rcond > 1e-14)) throw EliminationError("coherence block is singular; elimination is not defined");
    l11 -= l12 * lu.solve(l21);
  }
  out.generator.resize(nz, nz);
  for (Eigen::Index r = 0; r < nz; ++r) {
    for (Eigen::Index col = 0; col < nz; ++col) {
      out.generator(r, col) = l11(r, col).real();
      out.max_imaginary = std::max(out.max_imaginary, std::abs(l11(r, col).imag()));
    }
  }
  return out;
}

double compare_generators(const Eigen::MatrixXd& numeric, const Eigen::MatrixXd& analytic, double floor) {
  if (numeric.rows() != analytic.rows() || numeric.cols() != analytic.cols()) {
    throw SpecError("compare_generators: dimension mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index r = 0; r < numeric.rows(); ++r) {
    for (Eigen::Index col = 0; col < numeric.cols(); ++col) {
      const double a = numeric(r, col);
      const double b = analytic(r, col);
      if (a == 0.0 && b == 0.0) continue;
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), floor));
    }
  }
  return worst;
}

}  // namespace dnpsim::qme
