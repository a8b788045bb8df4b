#include "support.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/kmc/event_table.hpp"
#include "dnpsim/qme/adiabatic.hpp"
#include "dnpsim/qme/liouvillian.hpp"
#include "dnpsim/qme/operators.hpp"

#include <doctest.h>

#include <cmath>

using namespace dnpsim;
using namespace dnpsim::qme;
using namespace dnpsim::testing;

namespace {

CMatrix random_density(std::size_t dim, unsigned seed) {
  std::srand(seed);
  const CMatrix a = CMatrix::Random(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Complex trace_of(const CVector& v, std::size_t dim) { return unvectorize(v, dim).trace(); }

// Slow spins: every propagation method is practical.
PhysicalParams slow_params() {
  PhysicalParams p = carbon_params();
  p.omegaI_override = two_pi * 2e4;
  p.omega1 = two_pi * 1e3;
  p.R1S = 50.0;
  p.R2S = 2e3;
  p.R1I = 5.0;
  p.R2I = 300.0;
  return p;
}

}  // namespace

TEST_SUITE("qme-reference") {
  TEST_CASE("spin operators obey the angular momentum algebra") {
    const SpinBasis b(3);
    for (std::size_t s = 0; s < 3; ++s) {
      const CMatrix comm = b.splus(s) * b.sminus(s) - b.sminus(s) * b.splus(s);
      CHECK((comm - 2.0 * b.sz(s)).norm() < 1e-15);
      CHECK((b.sz(s) * b.splus(s) - b.splus(s) * b.sz(s) - b.splus(s)).norm() < 1e-15);
      for (std::size_t a = 0; a < b.dim(); ++a) CHECK(b.sz(s)(a, a).real() == b.m(a, s));
    }
    CHECK((b.splus(0) * b.splus(1) - b.splus(1) * b.splus(0)).norm() == 0.0);
    CHECK(b.ups(0) == 3);
    CHECK(b.ups(7) == 0);
    CHECK_THROWS_AS(SpinBasis(7), CapacityError);
  }

  TEST_CASE("superoperators act on column-stacked matrices") {
    const std::size_t dim = 4;
    const CMatrix x = random_density(dim, 1), a = CMatrix::Random(4, 4), b = CMatrix::Random(4, 4);
    CHECK((left_multiply(a) * vectorize(x) - vectorize(a * x)).norm() < 1e-13);
    CHECK((right_multiply(b) * vectorize(x) - vectorize(x * b)).norm() < 1e-13);
    CHECK((commutator(a).m * vectorize(x) - vectorize(a * x - x * a)).norm() < 1e-13);
    const CMatrix dx = unvectorize(dissipator(a).m * vectorize(x), dim);
    const CMatrix expect = a * x * a.adjoint() - 0.5 * (a.adjoint() * a * x + x * a.adjoint() * a);
    CHECK((dx - expect).norm() < 1e-13);
    CHECK(std::abs(dx.trace()) < 1e-13);
    CHECK((unvectorize(vectorize(x), dim) - x).norm() == 0.0);
  }

  TEST_CASE("one-nucleus Hamiltonian written out by hand") {
    PhysicalParams p = carbon_params();
    p.omegaI_override = 7.0;
    p.lambda = 3.0;
    p.omega1 = 2.0;
    const double A = 5.0, B = 4.0;
    const auto h = build_hamiltonian(p, make_couplings({A}, {B}));
    // basis |S I>: 0 = up up, 1 = up down, 2 = down up, 3 = down down
    CMatrix ref = CMatrix::Zero(4, 4);
    const double mS[] = {0.5, 0.5, -0.5, -0.5}, mI[] = {0.5, -0.5, 0.5, -0.5};
    for (int a = 0; a < 4; ++a) ref(a, a) = 7.0 * (mS[a] + mI[a]) + 3.0 * mS[a] + A * mI[a] * mS[a];
    ref(0, 2) = ref(1, 3) = 1.0;         // (w1/2) S+
    ref(0, 1) = B / 2.0 * 0.5;           // (|B|/2) I+ S_z, electron up
    ref(2, 3) = B / 2.0 * -0.5;          // electron down
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) ref(b, a) = std::conj(ref(a, b));
    }
    CHECK((h.total() - ref).norm() < 1e-14);
    CHECK((h.Hminus - h.Hplus.adjoint()).norm() == 0.0);
  }

  TEST_CASE("dipolar term is the secular flip-flop form") {
    PhysicalParams p = carbon_params();
    p.omegaI_override = 0.0;
    const double d = 3.0;
    const auto h = build_hamiltonian(p, make_couplings({0.0, 0.0}, {0.0, 0.0}, {d}));
    const SpinBasis b(3);
    // d (3 Iz Jz - I.J) = d (2 Iz Jz - (I+J- + I-J+)/2)
    const CMatrix ref = d * (2.0 * b.sz(1) * b.sz(2) - 0.5 * (b.splus(1) * b.sminus(2) + b.sminus(1) * b.splus(2)));
    CHECK((h.H0 - ref).norm() < 1e-14);
  }

  TEST_CASE("Liouvillian preserves trace and hermiticity") {
    const auto p = proton_params();
    const auto c = four_proton_couplings();
    const auto L = build_liouvillian(build_hamiltonian(p, c), build_relaxation(p, 5));
    CHECK(L.kind == SuperKind::Liouvillian);
    const CMatrix rho = random_density(32, 2);
    const CMatrix drho = unvectorize(L.m * vectorize(rho), 32);
    CHECK(std::abs(drho.trace()) < 1e-9 * L.m.cwiseAbs().maxCoeff());
    CHECK((drho - drho.adjoint()).norm() < 1e-9 * L.m.cwiseAbs().maxCoeff());
    CHECK(std::abs(trace_of(build_relaxation(p, 5).m * vectorize(rho), 32)) < 1e-9);
    CHECK_THROWS_AS(build_hamiltonian(p, make_couplings(std::vector<double>(6, 0.0), std::vector<double>(6, 0.0))),
                    CapacityError);
  }

  TEST_CASE("undriven steady state puts the electron at -P0") {
    PhysicalParams p = slow_params();
    p.omega1 = 0.0;
    const auto c = make_couplings({two_pi * 500}, {two_pi * 800});
    const auto L = build_liouvillian(build_hamiltonian(p, c), build_relaxation(p, 2));
    const auto pol = polarizations(steady_state(L));
    CHECK(pol[0] == doctest::Approx(-p.P0()).epsilon(1e-9));
    CHECK(std::abs(pol[1]) < 1e-9);
  }

  TEST_CASE("product and thermal states") {
    const std::vector<double> pol{0.3, -0.5, 1.0};
    const CMatrix rho = product_state(pol);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-15);
    const auto back = polarizations(rho);
    for (std::size_t s = 0; s < 3; ++s) CHECK(back[s] == doctest::Approx(pol[s]).epsilon(1e-14));
    const auto th = polarizations(thermal_state(carbon_params(), 2));
    CHECK(th[0] == doctest::Approx(-carbon_params().P0()));
    CHECK(th[1] == 0.0);
  }

  TEST_CASE("free relaxation is exponential for every method") {
    PhysicalParams p = slow_params();
    p.omega1 = 0.0;
    const auto c = make_couplings({0.0}, {0.0});
    const auto L = build_liouvillian(build_hamiltonian(p, c), build_relaxation(p, 2));
    const std::vector<double> start{1.0, 1.0};
    const auto grid = linear_grid(0.5, 11);
    for (auto method : {PropagationMethod::Spectral, PropagationMethod::Exponential, PropagationMethod::RungeKutta}) {
      PropagationOptions o;
      o.method = method;
      o.rel_tol = 1e-10;
      const auto r = propagate(L, product_state(start), grid, o);
      for (std::size_t t = 0; t < grid.size(); ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        CHECK(std::abs(r.series.mean(row, 0) - (-p.P0() + (1 + p.P0()) * std::exp(-p.R1S * grid[t]))) < 1e-8);
        CHECK(std::abs(r.series.mean(row, 1) - std::exp(-p.R1I * grid[t])) < 1e-8);
      }
      CHECK(r.series.se.isZero());
    }
  }

  TEST_CASE("methods agree for a coupled system at modest Larmor frequency") {
    const auto p = slow_params();
    const auto c = make_couplings({two_pi * 500, -two_pi * 300}, {two_pi * 900, two_pi * 400}, {two_pi * 50});
    const auto L = build_liouvillian(build_hamiltonian(p, c), build_relaxation(p, 3));
    const auto rho0 = thermal_state(p, 3);
    const auto grid = linear_grid(0.2, 9);
    PropagationOptions o;
    const auto spectral = propagate(L, rho0, grid, o);
    o.method = PropagationMethod::Exponential;
    const auto expo = propagate(L, rho0, grid, o);
    o.method = PropagationMethod::RungeKutta;
    o.rel_tol = 1e-10;
    o.abs_tol = 1e-13;
    const auto rk = propagate(L, rho0, grid, o);
    CHECK((spectral.series.mean - expo.series.mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((spectral.series.mean - rk.series.mean).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(spectral.max_trace_error < 1e-10);
    CHECK(spectral.max_hermiticity_error < 1e-10);
    // the drive moves the nuclei away from zero
    CHECK(std::abs(spectral.series.mean(8, 1)) > 1e-4);
  }

  TEST_CASE("states are kept on request") {
    const auto p = slow_params();
    const auto c = make_couplings({0.0}, {0.0});
    const auto L = build_liouvillian(build_hamiltonian(p, c), build_relaxation(p, 2));
    PropagationOptions o;
    o.keep_states = true;
    const std::vector<double> grid{0.0, 0.1};
    const auto r = propagate(L, thermal_state(p, 2), grid, o);
    REQUIRE(r.states.size() == 2);
    CHECK(std::abs(r.states[1].trace() - 1.0) < 1e-12);
  }

  TEST_CASE("projection is exact without couplings or drive") {
    PhysicalParams p = carbon_params();
    p.omega1 = 0.0;
    for (std::size_t n : {1u, 2u, 3u}) {
      const auto c = make_couplings(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
      const auto proj = adiabatic_project(p, c);
      const Eigen::MatrixXd G = kmc::classical_generator(kmc::Model(p, c));
      CHECK(compare_generators(proj.generator, G, 0.0) < 1e-10);
      CHECK(proj.generator.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("projection with a drive keeps columns summing to zero") {
    const auto p = carbon_params();
    const auto c = make_couplings({two_pi * 20e3, -two_pi * 15e3}, {two_pi * 200e3, two_pi * 100e3}, {two_pi * 100});
    const auto proj = adiabatic_project(p, c);
    const double scale = proj.generator.cwiseAbs().maxCoeff();
    CHECK(proj.generator.colwise().sum().cwiseAbs().maxCoeff() < 1e-9 * scale);
    // off-diagonal rates may dip below zero only by the neglected higher orders
    const double eps = two_pi * 200e3 / p.omegaI();
    for (Eigen::Index a = 0; a < 8; ++a) {
      for (Eigen::Index b = 0; b < 8; ++b) {
        if (a != b) CHECK(proj.generator(a, b) >= -eps * eps * scale);
      }
    }
    CHECK(proj.rcond > 0.0);
    CHECK_THROWS_AS(adiabatic_project(p, make_couplings(std::vector<double>(4, 0.0), std::vector<double>(4, 0.0))),
                    CapacityError);
  }

  TEST_CASE("generator comparison uses the floor for small entries") {
    Eigen::MatrixXd a(2, 2), b(2, 2);
    a << -1.0, 2.0, 1.0, -2.0;
    b << -1.1, 2.0, 1.1, -2.0;
    CHECK(compare_generators(a, b, 0.0) == doctest::Approx(0.1 / 1.1));
    b(0, 1) = 0.0;
    a(0, 1) = 1e-6;
    CHECK(compare_generators(a, b, 1.0) == doctest::Approx(0.1 / 1.1));
    CHECK_THROWS_AS(compare_generators(a, Eigen::MatrixXd::Zero(3, 3), 1.0), SpecError);
  }
}
