#include "support.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/experiments/compare.hpp"
#include "dnpsim/experiments/config.hpp"
#include "dnpsim/experiments/presets.hpp"
#include "dnpsim/experiments/runner.hpp"
#include "dnpsim/io/csv.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace dnpsim;
using namespace dnpsim::experiments;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() / ("dnpsim-test-" + std::to_string(::getpid()) + "-" + tag + "-" +
                                                  std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::string small = R"(name: small
physics:
  nucleus: 1H
  B0: 3.4 T
  temperature: 1 K
  omega1: 50 kHz
  T1e: 1 s
  T2e: 10 us
  T1n: 1 h
  T2n: 5 ms
system:
  type: couplings
  A: [0.318 MHz, -0.352 MHz]
  B: [0.935 MHz, 92.1 kHz]
  d:
    - [1, 2, -0.66 kHz]
simulation:
  trajectories: 200
  seed: 5
  time: {grid: linear, stop: 100 s, points: 6}
validity: {override: true}
)";

ExperimentConfig small_in(const fs::path& dir) {
  auto c = parse_config(small);
  c.output_dir = dir.string();
  return c;
}

PolarizationSeries toy_series(double shift = 0.0) {
  PolarizationSeries s;
  s.time = {0.0, 1.0, 2.0};
  s.mean = Eigen::MatrixXd::Zero(3, 2);
  s.se = Eigen::MatrixXd::Constant(3, 2, 0.01);
  s.mean.col(1) << 0.1, 0.2 + shift, 0.3;
  s.trajectories = 100;
  return s;
}

}  // namespace

TEST_SUITE("cli-experiments") {
  TEST_CASE("series CSV round-trips exactly") {
    const auto dir = scratch("csv");
    PolarizationSeries s = toy_series();
    s.mean(1, 0) = 1.0 / 3.0;
    s.se(2, 1) = 1e-17;
    io::write_series(dir / "s.csv", s);
    const auto back = io::read_series(dir / "s.csv");
    CHECK(back.time == s.time);
    CHECK(back.mean == s.mean);
    CHECK(back.se == s.se);
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK_THROWS_AS(io::read_series(dir / "missing.csv"), IoError);
    io::write_text_atomic(dir / "bad.csv", "time,p0,se0\n0,abc,0\n");
    CHECK_THROWS_AS(io::read_series(dir / "bad.csv"), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("geometry tables round-trip") {
    const auto dir = scratch("geom");
    const Geometry g({Vec3(0, 0, 0), Vec3(1.25, -2, 3), Vec3(0.1, 0.2, 0.3)});
    io::write_geometry(dir / "g.txt", g);
    const auto back = io::read_geometry(dir / "g.txt");
    REQUIRE(back.positions().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.positions()[i] == g.positions()[i]);
    fs::remove_all(dir);
  }

  TEST_CASE("config quantities need units") {
    const auto c = parse_config(small);
    CHECK(c.physics.omega1 == doctest::Approx(testing::two_pi * 50e3));
    CHECK(c.physics.R2S == doctest::Approx(1e5));
    CHECK(c.physics.R1I == doctest::Approx(1.0 / 3600));
    auto text = small;
    text.replace(text.find("omega1: 50 kHz"), 14, "omega1: 50000");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("omega1") != std::string::npos);
    }
  }

  TEST_CASE("config rejects missing and unknown keys") {
    auto no_traj = small;
    no_traj.replace(no_traj.find("  trajectories: 200\n"), 20, "");
    CHECK_THROWS_AS(parse_config(no_traj), ConfigError);
    CHECK_THROWS_AS(parse_config(small + "extra: 1\n"), ConfigError);
    auto typo = small;
    typo.replace(typo.find("T2n"), 3, "T2x");
    CHECK_THROWS_AS(parse_config(typo), ConfigError);
    auto bad_index = small;
    bad_index.replace(bad_index.find("[1, 2,"), 6, "[1, 5,");
    CHECK_THROWS_AS(parse_config(bad_index), ConfigError);
    CHECK_THROWS_AS(parse_config(small + "system2: {}\n"), ConfigError);
    const std::string missing_file = R"(name: f
physics: {B0: 3.4 T, temperature: 1 K, omega1: 1 kHz, R1S: 1 s^-1, R2S: 1 s^-1, R1I: 1 s^-1, R2I: 1 s^-1}
system: {type: positions, file: does-not-exist.xyz}
simulation: {trajectories: 1, time: {stop: 1 s, points: 2}}
)";
    CHECK_THROWS_AS(parse_config(missing_file), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), IoError);
  }

  TEST_CASE("canonical form re-parses to the same config") {
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      const auto c = load_preset(name);
      const auto j = to_json(c);
      CHECK(to_json(parse_config(j.dump())) == j);
      nlohmann::json manifest;
      manifest["config"] = j;
      CHECK(to_json(parse_config(manifest.dump())) == j);
    }
    CHECK_THROWS_AS(preset_text("no-such-preset"), ConfigError);
  }

  TEST_CASE("parameter edits by dotted path") {
    const auto c = parse_config(small);
    const auto half = with_parameter(c, "system.scale.bulk_dipolar", "0.5");
    CHECK(half.system.bulk_dipolar_scale == 0.5);
    CHECK(with_parameter(c, "simulation.trajectories", "7").simulation.trajectories == 7);
    CHECK(with_parameter(c, "physics.omega1", "20 kHz").physics.omega1 == doctest::Approx(testing::two_pi * 2e4));
    CHECK_THROWS_AS(with_parameter(c, "physics.nope", "1"), ConfigError);
    CHECK_THROWS_AS(with_parameter(c, "physics", "1"), ConfigError);
    CHECK_THROWS_AS(with_parameter(c, "physics.omega1", "20"), ConfigError);
  }

  TEST_CASE("random chain couplings follow the recipe") {
    const auto c = load_preset("chain-40-sweep");
    const auto sys = build_system(c);
    REQUIRE(sys.couplings.n_nuclei() == 40);
    CHECK(sys.couplings.Bsq(0) > 0.0);
    for (std::size_t k = 1; k < 40; ++k) CHECK(sys.couplings.Bsq(k) == 0.0);
    for (std::size_t k = 0; k < 40; ++k) CHECK(sys.couplings.A(k) == 0.0);
    CHECK(sys.couplings.pairs().size() == 39);
    double mean = 0.0;
    for (const auto& p : sys.couplings.pairs()) {
      CHECK(p.j == p.k + 1);
      mean += p.d;
    }
    mean /= 39.0;
    CHECK(std::abs(mean / (testing::two_pi * 7.45) - 1.0) < 0.1);
    const auto bulk = build_system(with_parameter(c, "system.scale.bulk_dipolar", "0.5")).couplings;
    CHECK(bulk.pairs()[0].d == sys.couplings.pairs()[0].d);
    CHECK(bulk.pairs()[5].d == 0.5 * sys.couplings.pairs()[5].d);
  }

  TEST_CASE("validity refusal and override") {
    auto c = parse_config(small);
    c.validity.override = false;
    c.output_dir = scratch("validity").string();
    RunOptions o;
    o.write_outputs = false;
    CHECK_FALSE(check_validity(c).pass);
    CHECK_THROWS_AS(run_experiment(c, o), ValidityError);
    c.validity.override = true;
    c.simulation.trajectories = 10;
    const auto r = run_experiment(c, o);
    CHECK_FALSE(r.warnings.empty());
    fs::remove_all(c.output_dir);
  }

  TEST_CASE("runs are reproducible and manifests replay them") {
    const auto dir = scratch("replay");
    const auto first = run_experiment(small_in(dir / "a"));
    const auto again = run_experiment(small_in(dir / "b"));
    CHECK(io::read_text(dir / "a" / "kmc.csv") == io::read_text(dir / "b" / "kmc.csv"));
    CHECK(io::read_text(dir / "a" / "nuclear_average.csv") == io::read_text(dir / "b" / "nuclear_average.csv"));

    auto replay = load_config(dir / "a" / "manifest.json");
    replay.output_dir = (dir / "c").string();
    run_experiment(replay);
    CHECK(io::read_text(dir / "a" / "kmc.csv") == io::read_text(dir / "c" / "kmc.csv"));

    const auto manifest = nlohmann::json::parse(io::read_text(dir / "a" / "manifest.json"));
    CHECK(manifest.contains("seeds"));
    CHECK(manifest.at("config").at("simulation").at("seed") == 5);
    CHECK(first.kmc.series.mean == again.kmc.series.mean);
    fs::remove_all(dir);
  }

  TEST_CASE("no drive means no nuclear polarization") {
    auto c = with_parameter(parse_config(small), "physics.omega1", "0 Hz");
    RunOptions o;
    o.write_outputs = false;
    c.simulation.trajectories = 2000;
    const auto r = run_experiment(c, o);
    // nuclei start unpolarized and only relax, so they stay at zero within the noise
    const auto& s = r.kmc.series;
    for (Eigen::Index t = 0; t < s.mean.rows(); ++t) {
      for (Eigen::Index k = 1; k < 3; ++k) CHECK(std::abs(s.mean(t, k)) <= 4.0 * s.se(t, k));
    }
  }

  TEST_CASE("reference run is attached and compared") {
    const auto dir = scratch("ref");
    auto c = small_in(dir);
    c.reference.enabled = true;
    c.reference.dump_generator = true;
    const auto r = run_experiment(c);
    REQUIRE(r.qme.has_value());
    REQUIRE(r.comparison.has_value());
    CHECK(r.comparison->spins.size() == 3);
    CHECK(fs::exists(dir / "qme.csv"));
    CHECK(fs::exists(dir / "comparison.csv"));
    CHECK(fs::exists(dir / "generator_projected.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("series comparison") {
    const auto a = toy_series();
    auto self = compare_series(a, a);
    CHECK(self.pass);
    CHECK(self.spins[1].max_sigma == 0.0);

    const auto shifted = compare_series(a, toy_series(0.2));
    CHECK_FALSE(shifted.pass);
    REQUIRE(shifted.failing().size() == 1);
    CHECK(shifted.failing()[0] == 1);
    CHECK(shifted.spins[1].worst_time == 1.0);
    CHECK(shifted.spins[1].max_sigma == doctest::Approx(0.2 / std::sqrt(2e-4)));
    CHECK(shifted.summary().find("FAIL") != std::string::npos);

    auto other = toy_series();
    other.time = {0.0, 1.5, 2.0};
    CHECK_THROWS_AS(compare_series(a, other), SpecError);
    Tolerance t;
    t.interpolate = true;
    CHECK_NOTHROW(compare_series(a, other, t));

    PolarizationSeries wide = toy_series();
    wide.mean.conservativeResize(3, 3);
    wide.se.conservativeResize(3, 3);
    CHECK_THROWS_AS(compare_series(a, wide), SpecError);

    auto exact = toy_series();
    exact.se.setZero();
    auto nudged = exact;
    nudged.mean(2, 1) += 1e-12;
    CHECK_FALSE(compare_series(exact, nudged).pass);
    t.interpolate = false;
    t.absolute = 1e-10;
    CHECK(compare_series(exact, nudged, t).pass);
  }

  TEST_CASE("a one-value sweep is the plain run") {
    const auto dir = scratch("sweep");
    auto base = small_in(dir);
    const auto s = sweep(base, "simulation.seed", {"5"});
    REQUIRE(s.runs.size() == 1);
    base.output_dir = (dir / "plain").string();
    const auto plain = run_experiment(base);
    CHECK(s.runs[0].kmc.series.mean == plain.kmc.series.mean);
    CHECK(fs::exists(s.summary));
    CHECK_THROWS_AS(sweep(base, "simulation.nothing", {"1"}), ConfigError);
    fs::remove_all(dir);
  }
}
