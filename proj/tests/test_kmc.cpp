#include "support.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/kmc/engine.hpp"
#include "dnpsim/kmc/event_table.hpp"
#include "dnpsim/kmc/rates.hpp"
#include "dnpsim/kmc/sum_tree.hpp"
#include "dnpsim/kmc/trajectory.hpp"
#include "dnpsim/qme/operators.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>

using namespace dnpsim;
using namespace dnpsim::kmc;
using namespace dnpsim::testing;

namespace {

// Fast rates so a few seconds of dynamics visit every configuration.
PhysicalParams fast_params() {
  PhysicalParams p = carbon_params();
  p.omegaI_override = two_pi * 10e6;
  p.omega1 = two_pi * 50e3;
  p.R1S = 1.0;
  p.R2S = 1e5;
  p.R1I = 0.1;
  p.R2I = 1e3;
  return p;
}

Couplings two_nuclei() { return make_couplings({two_pi * 20e3, -two_pi * 15e3}, {two_pi * 200e3, two_pi * 100e3}, {two_pi * 100}); }

// Generator written out from the jump operators: G(a, b) = sum_L |<a|L|b>|^2 rate_L(b).
Eigen::MatrixXd lindblad_generator(const PhysicalParams& p, const Couplings& c) {
  const std::size_t n = c.n_nuclei(), N = n + 1;
  const qme::SpinBasis basis(N);
  const std::size_t dim = basis.dim();
  const double wI = p.omegaI(), P0 = p.P0(), g2 = p.R2S + p.R2I;

  struct Jump {
    qme::CMatrix op;
    std::function<double(std::size_t)> rate;
  };
  std::vector<Jump> jumps;
  const double drive = p.omega1 * p.omega1 / (2.0 * wI * wI) * p.R2S;
  jumps.push_back({basis.splus(0), [=](std::size_t) { return (1.0 - P0) / 2.0 * p.R1S + drive; }});
  jumps.push_back({basis.sminus(0), [=](std::size_t) { return (1.0 + P0) / 2.0 * p.R1S + drive; }});
  for (std::size_t k = 0; k < n; ++k) {
    const double g = p.R1I / 2.0 + c.Bsq(k) / (8.0 * wI * wI) * p.R2I;
    jumps.push_back({basis.splus(k + 1), [=](std::size_t) { return g; }});
    jumps.push_back({basis.sminus(k + 1), [=](std::size_t) { return g; }});
    const qme::CMatrix Y = basis.splus(k + 1) * basis.sminus(0) + basis.sminus(k + 1) * basis.splus(0);
    jumps.push_back({Y, [=, &basis, &c](std::size_t b) {
                       const double num = p.omega1 * p.omega1 * c.Bsq(k);
                       if (num == 0.0) return 0.0;
                       double h = 0.0;
                       for (std::size_t s = 0; s < n; ++s) {
                         if (s != k) h += c.A(s) * basis.m(b, s + 1);
                       }
                       const double D = (p.lambda + h) / g2;
                       return num / (8.0 * wI * wI * g2) / (1.0 + D * D);
                     }});
  }
  for (const auto& pr : c.pairs()) {
    const qme::CMatrix X = basis.splus(pr.k + 1) * basis.sminus(pr.j + 1) + basis.sminus(pr.k + 1) * basis.splus(pr.j + 1);
    jumps.push_back({X, [=, &basis, &c](std::size_t b) {
                       const double C = (c.A(pr.k) - c.A(pr.j)) * basis.m(b, 0) / (2.0 * p.R2I);
                       return pr.d * pr.d / (4.0 * p.R2I) / (1.0 + C * C);
                     }});
  }

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& j : jumps) {
    for (std::size_t b = 0; b < dim; ++b) {
      for (std::size_t a = 0; a < dim; ++a) {
        const double w = std::norm(j.op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        if (a != b && w != 0.0) G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += w * j.rate(b);
      }
    }
  }
  for (Eigen::Index b = 0; b < G.cols(); ++b) {
    double out = 0.0;
    for (Eigen::Index a = 0; a < G.rows(); ++a) {
      if (a != b) out += G(a, b);
    }
    G(b, b) = -out;
  }
  return G;
}

Configuration random_configuration(std::size_t N, std::span<const double> A, Rng& rng) {
  std::vector<std::int8_t> s(N);
  for (auto& x : s) x = uniform01(rng) < 0.5 ? 1 : -1;
  return Configuration(std::move(s), A);
}

}  // namespace

TEST_SUITE("zeeman-kmc") {
  TEST_CASE("sum tree keeps exact partial sums and skips empty leaves") {
    SumTree t(5);
    const double w[] = {1.0, 0.0, 2.5, 0.0, 0.5};
    for (std::size_t i = 0; i < 5; ++i) t.set(i, w[i]);
    CHECK(t.total() == 4.0);
    CHECK(t.find(0.0) == 0);
    CHECK(t.find(0.999) == 0);
    CHECK(t.find(1.0) == 2);
    CHECK(t.find(3.49) == 2);
    CHECK(t.find(3.5) == 4);
    CHECK(t.find(3.9999999) == 4);
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) t.set(static_cast<std::size_t>(rng() % 5), uniform01(rng));
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += t.weight(i);
    CHECK(t.total() == doctest::Approx(sum).epsilon(1e-15));
  }

  TEST_CASE("single-spin rates match the closed forms") {
    const auto p = carbon_params();
    const auto r = single_spin_rates(p, make_couplings({0.0}, {0.0}));
    CHECK(r.S_plus == doctest::Approx(0.38741470316968407).epsilon(1e-12));
    CHECK(r.S_minus == doctest::Approx(1.3669709544491526).epsilon(1e-12));
    CHECK(r.I_plus[0] == doctest::Approx(7e-5).epsilon(1e-12));
    CHECK(r.I_minus[0] == r.I_plus[0]);
  }

  TEST_CASE("flip-flop rates for the 40-spin chain parameters") {
    PhysicalParams p = carbon_params();
    p.omegaI_override = two_pi * 36e6;
    p.omega1 = two_pi * 100e3;
    p.R2S = 1e5;
    p.R2I = 800.0;
    const auto c = make_couplings({0.0, 0.0}, {two_pi * 40e3, 0.0}, {two_pi * 7.45});
    const Configuration conf(3, c.A());
    CHECK(is_flipflop_rate(0, conf, p, c) == doctest::Approx(0.60439964243394573).epsilon(1e-12));
    CHECK(is_flipflop_rate(1, conf, p, c) == 0.0);
    CHECK(ii_flipflop_rate(0, 1, 0.5, p, c) == doctest::Approx(0.68473464783932769).epsilon(1e-12));
  }

  TEST_CASE("IS rate ignores the flipping pair itself") {
    const auto p = proton_params();
    const auto c = four_proton_couplings();
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      auto conf = random_configuration(5, c.A(), rng);
      for (std::size_t k = 0; k < 4; ++k) {
        const double r = is_flipflop_rate(k, conf, p, c);
        auto f = conf;
        f.flip_nucleus(k, c.A(k));
        CHECK(is_flipflop_rate(k, f, p, c) == r);
        f = conf;
        f.flip_electron();
        CHECK(is_flipflop_rate(k, f, p, c) == r);
      }
    }
  }

  TEST_CASE("second-order shifts make II rates depend on the electron") {
    const auto p = fast_params();
    const auto c = two_nuclei();
    RateOptions so;
    so.second_order = true;
    CHECK(ii_flipflop_rate(0, 1, 0.5, p, c) != ii_flipflop_rate(0, 1, -0.5, p, c, so));
    CHECK(is_flipflop_rate(0, Configuration(3, c.A()), p, c, so) != is_flipflop_rate(0, Configuration(3, c.A()), p, c));
  }

  TEST_CASE("generator from the event list equals the jump-operator form") {
    for (const auto& c : {make_couplings({two_pi * 20e3}, {two_pi * 200e3}), two_nuclei()}) {
      const Model m(fast_params(), c);
      const Eigen::MatrixXd G = classical_generator(m);
      const Eigen::MatrixXd ref = lindblad_generator(fast_params(), c);
      CHECK((G - ref).cwiseAbs().maxCoeff() == 0.0);
      CHECK(G.colwise().sum().cwiseAbs().maxCoeff() < 1e-12 * G.cwiseAbs().maxCoeff());
    }
  }

  TEST_CASE("event enumeration lists only applicable jumps") {
    const auto c = two_nuclei();
    const Model m(fast_params(), c);
    // electron up, nuclei up and down
    const Configuration conf(std::vector<std::int8_t>{1, 1, -1}, c.A());
    const auto t = enumerate_events(conf, m);
    std::map<EventKind, int> count;
    double sum = 0.0;
    for (const auto& e : t.events) {
      ++count[e.kind];
      sum += e.rate;
    }
    CHECK(count[EventKind::ElectronFlip] == 1);
    CHECK(count[EventKind::NuclearFlip] == 2);
    CHECK(count[EventKind::ISFlipFlop] == 1);  // only the down nucleus is antiparallel to the electron
    CHECK(count[EventKind::IIFlipFlop] == 1);
    CHECK(t.total_rate == doctest::Approx(sum));
  }

  TEST_CASE("events are selected in proportion to their rates") {
    EventTable t;
    const double rates[] = {0.5, 2.0, 0.0, 1.5};
    for (double r : rates) {
      Event e;
      e.rate = r;
      t.events.push_back(e);
      t.total_rate += r;
    }
    Rng rng(3);
    const int n = 200000;
    std::vector<int> hits(4, 0);
    for (int i = 0; i < n; ++i) ++hits[select_event(t, rng)];
    CHECK(hits[2] == 0);
    for (std::size_t i = 0; i < 4; ++i) {
      const double q = rates[i] / t.total_rate;
      CHECK(std::abs(hits[i] / double(n) - q) <= 4.0 * std::sqrt(q * (1 - q) / n) + 1e-12);
    }
    EventTable empty;
    CHECK_THROWS_AS(select_event(empty, rng), StallError);
  }

  TEST_CASE("waiting times are exponential with the total rate") {
    const auto c = two_nuclei();
    const Model m(fast_params(), c);
    const Configuration conf(3, c.A());
    const auto t = enumerate_events(conf, m);
    Rng rng(17);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      auto copy = conf;
      const double w = kmc_step(copy, t, m, rng).waiting_time;
      sum += w;
      sumsq += w * w;
    }
    const double mean = sum / n, expect = 1.0 / t.total_rate;
    CHECK(std::abs(mean - expect) < 4.0 * expect / std::sqrt(double(n)));
    CHECK(sumsq / n == doctest::Approx(2.0 * expect * expect).epsilon(0.03));
  }

  TEST_CASE("engine state stays consistent with a fresh enumeration") {
    PhysicalParams p = proton_params();
    const auto c = four_proton_couplings();
    for (bool second : {false, true}) {
      RateOptions o;
      o.second_order = second;
      const Model m(p, c, o);
      Rng rng(21);
      Engine e(m, random_configuration(5, c.A(), rng));
      for (int i = 0; i < 5000; ++i) {
        e.step(rng);
        if (i % 97 == 0) {
          const auto t = enumerate_events(e.configuration(), m);
          CHECK(e.exact_total_rate() == doctest::Approx(t.total_rate).epsilon(1e-12));
          CHECK(e.bound_total_rate() >= e.exact_total_rate() * (1 - 1e-12));
          CHECK(e.configuration().hyperfine_sum() ==
                doctest::Approx(e.configuration().recompute_hyperfine(c.A())).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("engine and explicit table give the same occupation statistics") {
    const auto p = fast_params();
    const auto c = two_nuclei();
    const Model m(p, c);
    const std::vector<double> grid{0.0, 0.3};
    const std::int8_t start[] = {-1, -1, -1};
    EnsembleOptions o;
    o.trajectories = 20000;
    o.master_seed = 4;
    o.initial = InitialCondition::fixed(start);
    o.collect_histogram = true;
    const auto res = run_ensemble(m, grid, o);
    const Eigen::VectorXd P0 = Eigen::VectorXd::Unit(8, static_cast<Eigen::Index>(Configuration(std::vector<std::int8_t>{-1, -1, -1}, c.A()).index()));
    const Eigen::VectorXd P = (classical_generator(m) * 0.3).exp() * P0;
    for (Eigen::Index s = 0; s < 8; ++s) {
      const double f = res.histogram[1][static_cast<std::size_t>(s)] / double(o.trajectories);
      CHECK(std::abs(f - P(s)) <= 4.0 * std::sqrt(P(s) * (1 - P(s)) / o.trajectories) + 1e-9);
    }
  }

  TEST_CASE("with P0 = 1 and no drive the electron ends down and stays there") {
    PhysicalParams p = fast_params();
    p.temperature = 1e-3;  // tanh saturates to exactly 1
    p.omega1 = 0.0;
    REQUIRE(p.P0() == 1.0);
    const Model m(p, make_couplings({}, {}));
    const std::vector<double> grid{0.0, 5.0, 50.0, 500.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto s = run_trajectory(m, grid, Configuration(1, {}), seed);
      CHECK(s.at(0, 0) == 1);
      CHECK(s.at(2, 0) == -1);
      CHECK(s.at(3, 0) == -1);
    }
  }

  TEST_CASE("lone electron relaxes exponentially towards -P0") {
    PhysicalParams p = fast_params();
    p.omega1 = 0.0;
    p.temperature = 3.0;
    const Model m(p, make_couplings({}, {}));
    const double P0 = m.P0();
    const auto grid = linear_grid(3.0, 7);
    EnsembleOptions o;
    o.trajectories = 20000;
    o.master_seed = 8;
    o.initial = InitialCondition::uniform(1, 1.0, 0.0);
    const auto r = run_ensemble(m, grid, o);
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const double expect = -P0 + (1.0 + P0) * std::exp(-p.R1S * grid[t]);
      const auto row = static_cast<Eigen::Index>(t);
      CHECK(std::abs(r.series.mean(row, 0) - expect) <= 4.0 * r.series.se(row, 0) + 1e-12);
    }
  }

  TEST_CASE("ensembles do not depend on the worker count") {
    const Model m(proton_params(), four_proton_couplings());
    const auto grid = linear_grid(200.0, 5);
    EnsembleOptions o;
    o.trajectories = 300;
    o.master_seed = 99;
    o.workers = 1;
    const auto one = run_ensemble(m, grid, o);
    o.workers = 3;
    const auto three = run_ensemble(m, grid, o);
    CHECK(one.series.mean == three.series.mean);
    CHECK(one.series.se == three.series.se);
    CHECK(one.nuclear_mean == three.nuclear_mean);
    CHECK(one.events == three.events);
    o.master_seed = 100;
    CHECK(run_ensemble(m, grid, o).series.mean != one.series.mean);
  }

  TEST_CASE("standard errors follow the +-1 outcome formula") {
    const Model m(proton_params(), four_proton_couplings());
    const std::vector<double> grid{0.0};
    EnsembleOptions o;
    o.trajectories = 1;
    CHECK(run_ensemble(m, grid, o).series.se.isZero());
    o.trajectories = 400;
    const auto r = run_ensemble(m, grid, o);
    const double mean = r.series.mean(0, 1);
    CHECK(r.series.se(0, 1) == doctest::Approx(std::sqrt((1 - mean * mean) / 399.0)));
  }

  TEST_CASE("rejects malformed grids and empty ensembles") {
    const Model m(proton_params(), four_proton_couplings());
    const std::vector<double> bad{1.0, 2.0};
    EnsembleOptions o;
    CHECK_THROWS_AS(run_ensemble(m, bad, o), SpecError);
    o.trajectories = 0;
    const std::vector<double> good{0.0, 1.0};
    CHECK_THROWS_AS(run_ensemble(m, good, o), SpecError);
  }
}
