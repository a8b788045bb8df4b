#include "dnpsim/qme/liouvillian.hpp"

#include "dnpsim/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cmath>
#include <sstream>

namespace dnpsim::qme {

Hamiltonian build_hamiltonian(const PhysicalParams& p, const Couplings& c) {
  const std::size_t n = c.n_nuclei();
  const SpinBasis basis(n + 1);
  const double wI = p.omegaI();

  Hamiltonian h;
  const CMatrix Sz = basis.sz(0);
  CMatrix total_z = Sz;
  h.H0 = p.lambda * Sz;
  h.Hplus = 0.5 * p.omega1 * basis.splus(0);

  std::vector<CMatrix> Iz(n), Ip(n);
  for (std::size_t k = 0; k < n; ++k) {
    Iz[k] = basis.sz(k + 1);
    Ip[k] = basis.splus(k + 1);
    total_z += Iz[k];
    h.H0 += c.A(k) * Iz[k] * Sz;
    h.Hplus += 0.5 * std::sqrt(c.Bsq(k)) * Ip[k] * Sz;
  }
  // 3 Iz Iz - I.I = 2 Iz Iz - (I+ I- + I- I+)/2
  for (const auto& pr : c.pairs()) {
    const CMatrix flipflop = Ip[pr.k] * Ip[pr.j].adjoint() + Ip[pr.k].adjoint() * Ip[pr.j];
    h.H0 += pr.d * (2.0 * Iz[pr.k] * Iz[pr.j] - 0.5 * flipflop);
  }
  h.HZ = wI * total_z;
  h.Hminus = h.Hplus.adjoint();
  return h;
}

Superoperator build_relaxation(const PhysicalParams& p, std::size_t n_spins) {
  const SpinBasis basis(n_spins);
  const std::size_t D2 = basis.dim() * basis.dim();
  Superoperator g{CMatrix::Zero(D2, D2), SuperKind::Relaxation};
  const double P0 = p.P0();

  const CMatrix Dp = dissipator(basis.splus(0)).m;
  const CMatrix Dm = dissipator(basis.sminus(0)).m;
  g.m += 0.5 * p.R1S * (Dp + Dm);
  g.m += 0.5 * P0 * p.R1S * (Dm - Dp);
  g.m += 2.0 * p.R2S * dissipator(basis.sz(0)).m;
  for (std::size_t s = 1; s < n_spins; ++s) {
    g.m += 0.5 * p.R1I * (dissipator(basis.splus(s)).m + dissipator(basis.sminus(s)).m);
    g.m += 2.0 * p.R2I * dissipator(basis.sz(s)).m;
  }
  return g;
}

Superoperator build_liouvillian(const Hamiltonian& h, const Superoperator& relaxation) {
  Superoperator L{relaxation.m, SuperKind::Liouvillian};
  L.m += Complex(0.0, -1.0) * commutator(h.total()).m;
  return L;
}

CMatrix product_state(std::span<const double> polarization) {
  const SpinBasis basis(polarization.size());
  CMatrix rho = CMatrix::Zero(basis.dim(), basis.dim());
  for (std::size_t a = 0; a < basis.dim(); ++a) {
    double w = 1.0;
    for (std::size_t s = 0; s < polarization.size(); ++s) w *= 0.5 + polarization[s] * basis.m(a, s);
    rho(a, a) = w;
  }
  return rho;
}

CMatrix thermal_state(const PhysicalParams& p, std::size_t n_spins) {
  std::vector<double> pol(n_spins, 0.0);
  pol[0] = -p.P0();
  return product_state(pol);
}

CMatrix steady_state(const Superoperator& L) {
  const auto D2 = L.m.rows();
  const auto D = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(D2))));
  CMatrix a = L.m;
  CVector rhs = CVector::Zero(D2);
  a.row(0).setZero();
  for (std::size_t i = 0; i < D; ++i) a(0, static_cast<Eigen::Index>(vec_index(i, i, D))) = 1.0;
  rhs(0) = 1.0;
  Eigen::FullPivLU<CMatrix> lu(a);
  if (!lu.isInvertible()) throw PropagationError("steady state is not unique");
  return unvectorize(lu.solve(rhs), D);
}

std::vector<double> polarizations(const CMatrix& rho) {
  const auto D = static_cast<std::size_t>(rho.rows());
  const auto N = static_cast<std::size_t>(std::countr_zero(D));
  const SpinBasis basis(N);
  std::vector<double> p(N, 0.0);
  for (std::size_t a = 0; a < D; ++a) {
    const double pop = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
    for (std::size_t s = 0; s < N; ++s) p[s] += 2.0 * basis.m(a, s) * pop;
  }
  return p;
}

namespace {

void record(Propagation& out, std::size_t t, const CVector& v, std::size_t D, bool keep) {
  const CMatrix rho = unvectorize(v, D);
  if (!rho.allFinite()) {
    std::ostringstream msg;
    msg << "density matrix became non-finite at t = " << out.series.time[t];
    throw PropagationError(msg.str());
  }
  const auto p = polarizations(rho);
  for (std::size_t s = 0; s < p.size(); ++s) {
    out.series.mean(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = p[s];
  }
  out.max_trace_error = std::max(out.max_trace_error, std::abs(rho.trace() - Complex(1.0, 0.0)));
  out.max_hermiticity_error = std::max(out.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  if (keep) out.states.push_back(rho);
}

void propagate_exponential(const Superoperator& L, CVector v, std::span<const double> grid, Propagation& out,
                           std::size_t D, bool keep) {
  record(out, 0, v, D, keep);
  CMatrix step;
  double step_dt = -1.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = grid[i] - grid[i - 1];
    // Grids are often uniform; reuse the propagator when the interval repeats.
    if (!(std::abs(dt - step_dt) <= 1e-12 * dt)) {
      step = (L.m * dt).exp();
      step_dt = dt;
    }
    v = step * v;
    record(out, i, v, D, keep);
  }
}

/// Returns false when the eigenvectors are too ill-conditioned to use.
bool propagate_spectral(const Superoperator& L, const CVector& v0, std::span<const double> grid, Propagation& out,
                        std::size_t D, const PropagationOptions& opts) {
  Eigen::ComplexEigenSolver<CMatrix> es(L.m);
  if (es.info() != Eigen::Success) return false;
  const CMatrix& V = es.eigenvectors();
  const CVector& lambda = es.eigenvalues();
  Eigen::PartialPivLU<CMatrix> lu(V);
  if (!(lu.rcond() >= opts.min_rcond)) return false;
  const CVector c0 = lu.solve(v0);
  CVector ct(c0.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (Eigen::Index j = 0; j < c0.size(); ++j) ct(j) = c0(j) * std::exp(lambda(j) * grid[i]);
    record(out, i, V * ct, D, opts.keep_states);
  }
  return true;
}

void propagate_runge_kutta(const Superoperator& L, const CVector& v0, std::span<const double> grid,
                           const PropagationOptions& opts, Propagation& out, std::size_t D) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const auto n = static_cast<std::size_t>(v0.size());
  State x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = v0(static_cast<Eigen::Index>(i)).real();
    x[n + i] = v0(static_cast<Eigen::Index>(i)).imag();
  }
  CVector in(static_cast<Eigen::Index>(n)), outv(static_cast<Eigen::Index>(n));
  auto rhs = [&](const State& y, State& dy, double) {
    for (std::size_t i = 0; i < n; ++i) in(static_cast<Eigen::Index>(i)) = Complex(y[i], y[n + i]);
    outv.noalias() = L.m * in;
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = outv(static_cast<Eigen::Index>(i)).real();
      dy[n + i] = outv(static_cast<Eigen::Index>(i)).imag();
    }
  };
  std::size_t t_index = 0;
  auto observer = [&](const State& y, double) {
    CVector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = Complex(y[i], y[n + i]);
    record(out, t_index++, v, D, opts.keep_states);
  };
  const double first_dt = grid.size() > 1 ? (grid[1] - grid[0]) * 1e-3 : 1.0;
  try {
    auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), first_dt, observer,
                            odeint::max_step_checker(1'000'000));
  } catch (const PropagationError&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "adaptive integrator failed after " << t_index << " of " << grid.size()
        << " grid points (rel_tol " << opts.rel_tol << "): " << e.what();
    throw PropagationError(msg.str());
  }
}

}  // namespace

Propagation propagate(const Superoperator& L, const CMatrix& rho0, std::span<const double> t_grid,
                      const PropagationOptions& opts) {
  check_time_grid(t_grid);
  const auto D = static_cast<std::size_t>(rho0.rows());
  if (rho0.cols() != rho0.rows() || static_cast<std::size_t>(L.m.rows()) != D * D) {
    throw SpecError("propagate: dimensions of rho0 and L disagree");
  }
  if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > 1e-10) throw SpecError("propagate: rho0 must have unit trace");

  Propagation out;
  const auto N = static_cast<Eigen::Index>(std::countr_zero(D));
  const auto G = static_cast<Eigen::Index>(t_grid.size());
  out.series.time.assign(t_grid.begin(), t_grid.end());
  out.series.trajectories = 0;
  out.series.mean = Eigen::MatrixXd::Zero(G, N);
  out.series.se = Eigen::MatrixXd::Zero(G, N);

  const CVector v0 = vectorize(rho0);
  out.used = opts.method;
  if (opts.method == PropagationMethod::Spectral) {
    if (propagate_spectral(L, v0, t_grid, out, D, opts)) return out;
    out.used = PropagationMethod::Exponential;
    out.max_trace_error = out.max_hermiticity_error = 0.0;
    out.states.clear();
  }
  if (out.used == PropagationMethod::Exponential) {
    propagate_exponential(L, v0, t_grid, out, D, opts.keep_states);
  } else {
    propagate_runge_kutta(L, v0, t_grid, opts, out, D);
  }
  return out;
}

}  // namespace dnpsim::qme
