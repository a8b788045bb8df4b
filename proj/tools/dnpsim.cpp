// Command-line front end. Exit codes: 0 ok, 1 numerical failure, 2 invalid
// config or refused by the validity check, 3 comparison failed, 4 I/O.

#include "dnpsim/diffusion/diffusion.hpp"
#include "dnpsim/errors.hpp"
#include "dnpsim/experiments/compare.hpp"
#include "dnpsim/experiments/config.hpp"
#include "dnpsim/experiments/presets.hpp"
#include "dnpsim/experiments/runner.hpp"
#include "dnpsim/io/csv.hpp"
#include "dnpsim/kmc/event_table.hpp"
#include "dnpsim/kmc/rates.hpp"
#include "dnpsim/qme/adiabatic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dnpsim;
using namespace dnpsim::experiments;

namespace {

enum Exit { ok = 0, numeric = 1, invalid = 2, mismatch = 3, io_failure = 4 };

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::size_t> trajectories;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
  bool override_validity = false;
  bool second_order = false;
  bool dump_generator = false;
};

void add_common(CLI::App* app, Common& c) {
  auto* cfg = app->add_option("--config", c.config, "YAML config or a run manifest");
  auto* pre = app->add_option("--preset", c.preset, "shipped preset name");
  cfg->excludes(pre);
  app->add_option("--trajectories", c.trajectories, "override the trajectory count")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "override the master seed");
  app->add_option("--workers", c.workers, "worker threads (0: all cores)");
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--override-validity", c.override_validity, "run even if the adiabatic validity check fails");
  app->add_flag("--second-order", c.second_order, "include the 1/omegaI shifts of the constraint operators");
  app->add_flag("--dump-generator", c.dump_generator, "write the classical generator(s) as CSV");
}

ExperimentConfig resolve(const Common& c) {
  if (c.config.empty() && c.preset.empty()) throw ConfigError("give --config FILE or --preset NAME");
  ExperimentConfig cfg = c.config.empty() ? load_preset(c.preset) : load_config(c.config);
  if (c.trajectories) cfg.simulation.trajectories = *c.trajectories;
  if (c.seed) cfg.simulation.seed = *c.seed;
  if (c.workers) cfg.simulation.workers = *c.workers;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.override_validity) cfg.validity.override = true;
  if (c.second_order) cfg.simulation.second_order = true;
  if (c.dump_generator) cfg.reference.dump_generator = true;
  return cfg;
}

void print_validity(const ValidityReport& v) {
  std::cout << "validity: ratio " << v.ratio << " (threshold " << v.threshold << ", dominant " << v.dominant
            << ", epsilon " << v.epsilon << ") " << (v.pass ? "pass" : "FAIL") << '\n';
}

int cmd_generate(const Common& c) {
  const auto cfg = resolve(c);
  const auto sys = build_system(cfg);
  const fs::path dir = cfg.output_dir;
  if (sys.geometry) io::write_geometry(dir / "geometry.txt", *sys.geometry);
  std::string table = "nucleus,A,B\n";
  for (std::size_t k = 0; k < sys.couplings.n_nuclei(); ++k) {
    table += std::to_string(k + 1) + ',' + io::format_double(sys.couplings.A(k)) + ',' +
             io::format_double(std::sqrt(sys.couplings.Bsq(k))) + '\n';
  }
  io::write_text_atomic(dir / "couplings.csv", table);
  std::string pairs = "k,j,d\n";
  for (const auto& p : sys.couplings.pairs()) {
    pairs += std::to_string(p.k + 1) + ',' + std::to_string(p.j + 1) + ',' + io::format_double(p.d) + '\n';
  }
  io::write_text_atomic(dir / "pairs.csv", pairs);
  io::write_text_atomic(dir / "config.json", to_json(cfg).dump(2) + '\n');
  std::cout << sys.couplings.n_nuclei() << " nuclei, " << sys.couplings.pairs().size() << " pairs (rad/s) -> "
            << dir.string() << '\n';
  print_validity(validate_adiabatic(sys.params, sys.couplings, cfg.validity.threshold));
  return ok;
}

int cmd_simulate(const Common& c, bool with_reference) {
  auto cfg = resolve(c);
  if (with_reference) cfg.reference.enabled = true;
  const auto r = run_experiment(cfg);
  print_validity(r.validity);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << r.kmc.series.trajectories << " trajectories, " << r.kmc.events << " events in " << r.wall_seconds
            << " s -> " << cfg.output_dir << '\n';
  if (r.comparison) {
    std::cout << "kMC vs quantum reference (" << cfg.reference.sigmas << " sigma):\n" << r.comparison->summary();
    if (!r.comparison->pass) return mismatch;
  }
  if (r.diffusion) {
    const auto& d = *r.diffusion;
    std::cout << "D_av " << d.D_av << " A^2/s, " << d.rows.size() << " crossings; mean relative error reflective "
              << d.mean_err_reflective << ", absorbing " << d.mean_err_absorbing << '\n';
  }
  return ok;
}

int cmd_reference(const Common& c) {
  const auto cfg = resolve(c);
  const auto prop = run_reference(cfg);
  const fs::path path = fs::path(cfg.output_dir) / "qme.csv";
  io::write_series(path, prop.series);
  std::cout << "trace error " << prop.max_trace_error << ", hermiticity error " << prop.max_hermiticity_error << " -> "
            << path.string() << '\n';
  return ok;
}

int cmd_project(const Common& c) {
  const auto cfg = resolve(c);
  const auto sys = build_system(cfg);
  const auto proj = qme::adiabatic_project(sys.params, sys.couplings);
  const kmc::Model model(sys.params, sys.couplings);
  const Eigen::MatrixXd analytic = kmc::classical_generator(model);
  const auto v = validate_adiabatic(sys.params, sys.couplings, cfg.validity.threshold);
  const double floor = v.epsilon * analytic.cwiseAbs().maxCoeff();
  const double dev = qme::compare_generators(proj.generator, analytic, floor);
  const fs::path dir = cfg.output_dir;
  io::write_matrix(dir / "generator_projected.csv", proj.generator);
  io::write_matrix(dir / "generator_kmc.csv", analytic);
  std::cout << "max relative deviation " << dev << " (epsilon " << v.epsilon << ", floor " << floor
            << " s^-1), largest dropped imaginary part " << proj.max_imaginary << " -> " << dir.string() << '\n';
  return ok;
}

int cmd_diffusion(const Common& c, const std::string& series_path) {
  auto cfg = resolve(c);
  const auto sys = build_system(cfg);
  if (!sys.geometry) throw ConfigError("the diffusion model needs a chain geometry (system.type: chain)");
  const fs::path dir = cfg.output_dir;
  if (!series_path.empty()) {
    const auto d = compare_with_diffusion(io::read_series(series_path), *sys.geometry, sys.couplings, sys.params,
                                          cfg.diffusion);
    io::write_field(dir / "diffusion_reflective.csv", d.reflective);
    io::write_field(dir / "diffusion_absorbing.csv", d.absorbing);
    io::write_contours(dir / "contours_kmc.csv", d.kmc_contours);
    io::write_contours(dir / "contours_reflective.csv", d.reflective_contours);
    io::write_contours(dir / "contours_absorbing.csv", d.absorbing_contours);
    std::cout << "D_av " << d.D_av << " A^2/s; " << d.rows.size() << " crossings; mean relative error reflective "
              << d.mean_err_reflective << ", absorbing " << d.mean_err_absorbing << " -> " << dir.string() << '\n';
    return ok;
  }
  const double D = diffusion::average_diffusion_constant(sys.couplings, diffusion::chain_spacings(*sys.geometry),
                                                         sys.params.R2I);
  const auto pos = diffusion::chain_positions(*sys.geometry);
  const diffusion::GridSpec grid{pos.back(), cfg.diffusion.cells};
  const auto t = cfg.simulation.time.build();
  diffusion::SolveOptions so;
  so.source = cfg.diffusion.source == DiffusionSpec::Source::Fixed ? cfg.diffusion.source_value : 1.0;
  for (auto [b, name] : {std::pair{diffusion::Boundary::Reflective, "reflective"},
                         std::pair{diffusion::Boundary::Absorbing, "absorbing"}}) {
    const auto f = diffusion::solve_diffusion(D, grid, b, t, so);
    io::write_field(dir / (std::string("diffusion_") + name + ".csv"), f);
    io::write_contours(dir / (std::string("contours_") + name + ".csv"), diffusion::contour_times(f, cfg.diffusion.levels));
  }
  std::cout << "D_av " << D << " A^2/s over " << pos.back() << " A -> " << dir.string() << '\n';
  return ok;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& values) {
  const auto cfg = resolve(c);
  const auto sr = sweep(cfg, param, values);
  for (std::size_t i = 0; i < sr.values.size(); ++i) {
    const auto& r = sr.runs[i].kmc;
    std::cout << param << " = " << sr.values[i] << ": final average nuclear polarization " << r.nuclear_mean.back()
              << " +- " << r.nuclear_se.back() << '\n';
  }
  std::cout << "summary -> " << sr.summary.string() << '\n';
  return ok;
}

int cmd_compare(const std::string& a, const std::string& b, const Tolerance& tol) {
  const auto rep = compare_series(io::read_series(a), io::read_series(b), tol);
  std::cout << rep.summary();
  if (!rep.pass) {
    std::cout << "FAIL: spins";
    for (auto s : rep.failing()) std::cout << ' ' << s;
    std::cout << " exceed " << tol.sigmas << " sigma\n";
    return mismatch;
  }
  std::cout << "pass\n";
  return ok;
}

int cmd_validate(const Common& c) {
  const auto cfg = resolve(c);
  const auto v = check_validity(cfg);
  print_validity(v);
  if (!v.pass && !cfg.validity.override) return invalid;
  std::cout << "config ok\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solid-effect DNP simulator: kinetic Monte Carlo in the Zeeman subspace with quantum and diffusion references"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "print the shipped presets and exit");

  Common common;
  auto* gen = app.add_subcommand("generate", "build the geometry and coupling tables");
  auto* sim = app.add_subcommand("simulate", "run an experiment (kMC plus whatever the config enables)");
  auto* ref = app.add_subcommand("reference", "quantum master equation only");
  auto* proj = app.add_subcommand("project", "numerical adiabatic elimination vs the kMC generator");
  auto* dif = app.add_subcommand("diffusion", "diffusion model for a chain, alone or against a kMC series");
  auto* swp = app.add_subcommand("sweep", "run once per value of one config parameter");
  auto* cmp = app.add_subcommand("compare", "compare two series CSVs");
  auto* val = app.add_subcommand("validate", "check a config and the adiabatic validity condition");
  for (auto* sub : {gen, sim, ref, proj, dif, swp, val}) add_common(sub, common);

  bool with_reference = false;
  sim->add_flag("--reference", with_reference, "also run the quantum reference and compare");

  std::string series_path;
  dif->add_option("--series", series_path, "kMC series to compare against");

  std::string param;
  std::vector<std::string> values;
  swp->add_option("--param", param, "dotted config path, e.g. system.scale.bulk_dipolar")->required();
  swp->add_option("--values", values, "values to run")->required()->delimiter(',');

  std::string file_a, file_b;
  Tolerance tol;
  cmp->add_option("a", file_a)->required();
  cmp->add_option("b", file_b)->required();
  cmp->add_option("--sigmas", tol.sigmas, "allowed deviation in combined standard errors")->capture_default_str();
  cmp->add_option("--absolute", tol.absolute, "extra absolute allowance")->capture_default_str();
  cmp->add_flag("--interpolate", tol.interpolate, "resample b onto a's time grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid;
  }
  if (list) {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    return ok;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return invalid;
  }

  try {
    if (*gen) return cmd_generate(common);
    if (*sim) return cmd_simulate(common, with_reference);
    if (*ref) return cmd_reference(common);
    if (*proj) return cmd_project(common);
    if (*dif) return cmd_diffusion(common, series_path);
    if (*swp) return cmd_sweep(common, param, values);
    if (*cmp) return cmd_compare(file_a, file_b, tol);
    if (*val) return cmd_validate(common);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return io_failure;
  } catch (const ValidityError& e) {
    std::cerr << "refused: " << e.what() << " (use --override-validity to run anyway)\n";
    return invalid;
  } catch (const std::invalid_argument& e) {  // config, spec, geometry errors
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return numeric;
  }
  return ok;
}
