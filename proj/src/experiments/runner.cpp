#include "dnpsim/experiments/runner.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/io/csv.hpp"
#include "dnpsim/kmc/event_table.hpp"
#include "dnpsim/qme/adiabatic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace dnpsim::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* seed_note =
    "trajectory i runs on mt19937_64 seeded with splitmix64(splitmix64(master) ^ splitmix64(i + 0x632be59bd9b4e019)); "
    "counts are reduced as integers, so results do not depend on the worker count";

constexpr const char* unit_note =
    "config frequencies in Hz/kHz/MHz are multiplied by 2 pi; internal frequencies and couplings are rad/s, "
    "rates s^-1, lengths angstrom, polarization p = 2<m>";

json validity_json(const ValidityReport& v, bool overridden) {
  return {{"lhs", v.lhs},
          {"rhs", v.rhs},
          {"ratio", std::isfinite(v.ratio) ? json(v.ratio) : json("inf")},
          {"threshold", v.threshold},
          {"pass", v.pass},
          {"dominant", v.dominant},
          {"epsilon", v.epsilon},
          {"overridden", overridden && !v.pass}};
}

std::string validity_message(const ValidityReport& v) {
  return "adiabatic validity check failed: ratio " + io::format_double(v.ratio) + " < threshold " +
         io::format_double(v.threshold) + " (dominant term: " + v.dominant + ", epsilon " +
         io::format_double(v.epsilon) + ")";
}

std::string nuclear_average_csv(const kmc::EnsembleResult& r) {
  std::string out = "time,mean,se\n";
  for (std::size_t t = 0; t < r.series.time.size(); ++t) {
    out += io::format_double(r.series.time[t]) + ',' + io::format_double(r.nuclear_mean[t]) + ',' +
           io::format_double(r.nuclear_se[t]) + '\n';
  }
  return out;
}

kmc::InitialCondition initial_condition(const ExperimentConfig& c, const kmc::Model& model) {
  const double pe = c.simulation.initial_electron.value_or(-model.P0());
  return kmc::InitialCondition::uniform(model.n_spins(), pe, c.simulation.initial_nuclei);
}

std::string crossings_csv(const DiffusionReport& d) {
  std::string out = "level,spin,x,t_kmc,t_reflective,t_absorbing,err_reflective,err_absorbing\n";
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  for (const auto& r : d.rows) {
    out += io::format_double(r.level) + ',' + std::to_string(r.spin) + ',' + io::format_double(r.x) + ',' +
           io::format_double(r.t_kmc) + ',' + opt(r.t_reflective) + ',' + opt(r.t_absorbing) + ',' +
           io::format_double(r.err_reflective) + ',' + io::format_double(r.err_absorbing) + '\n';
  }
  return out;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double at) {
  if (at <= t.front()) return v.front();
  if (at >= t.back()) return v.back();
  const auto i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), at) - t.begin());
  const double w = (at - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * v[i - 1] + w * v[i];
}

}  // namespace

ValidityReport check_validity(const ExperimentConfig& config) {
  const BuiltSystem sys = build_system(config);
  return validate_adiabatic(sys.params, sys.couplings, config.validity.threshold);
}

qme::Propagation run_reference(const ExperimentConfig& config) {
  const BuiltSystem sys = build_system(config);
  const std::size_t n = sys.couplings.n_nuclei() + 1;
  if (n > qme::max_spins) {
    throw CapacityError("quantum reference supports at most " + std::to_string(qme::max_spins) + " spins, system has " +
                        std::to_string(n));
  }
  const auto L = qme::build_liouvillian(qme::build_hamiltonian(sys.params, sys.couplings),
                                        qme::build_relaxation(sys.params, n));
  std::vector<double> pol(n, config.simulation.initial_nuclei);
  pol[0] = config.simulation.initial_electron.value_or(-sys.params.P0());
  qme::PropagationOptions po;
  po.method = config.reference.method;
  po.rel_tol = config.reference.rel_tol;
  const auto grid = config.simulation.time.build();
  return qme::propagate(L, qme::product_state(pol), grid, po);
}

DiffusionReport compare_with_diffusion(const PolarizationSeries& kmc, const Geometry& geom, const Couplings& c,
                                       const PhysicalParams& p, const DiffusionSpec& spec) {
  const std::size_t n_spins = kmc.n_spins();
  if (geom.n_nuclei() + 1 != n_spins || c.n_nuclei() + 1 != n_spins) {
    throw SpecError("diffusion comparison: series, geometry and couplings disagree on the spin count");
  }
  if (spec.origin_spin < 1 || spec.origin_spin >= n_spins - 1) throw SpecError("diffusion origin spin out of range");
  if (kmc.n_times() < 4) throw SpecError("diffusion comparison needs at least four grid times");

  DiffusionReport rep;
  rep.origin_spin = spec.origin_spin;
  rep.D_av = diffusion::average_diffusion_constant(c, diffusion::chain_spacings(geom), p.R2I);

  const auto along = diffusion::chain_positions(geom);  // from the first nucleus
  const double x0 = along[spec.origin_spin - 1];
  rep.length = along.back() - x0;

  const auto G = kmc.n_times();
  const auto col = [&](std::size_t s) { return static_cast<Eigen::Index>(s); };
  if (spec.source == DiffusionSpec::Source::Fixed) {
    rep.source = spec.source_value;
  } else {
    const std::size_t from = G - std::max<std::size_t>(1, G / 4);
    double sum = 0.0;
    for (std::size_t t = from; t < G; ++t) sum += kmc.mean(static_cast<Eigen::Index>(t), col(spec.origin_spin));
    rep.source = sum / static_cast<double>(G - from);
  }
  if (!(std::abs(rep.source) > 0.0)) throw DomainError("diffusion comparison: source polarization is zero");

  diffusion::GridSpec grid{rep.length, spec.cells};
  diffusion::SolveOptions so;
  so.source = 1.0;
  std::vector<double> origin_series(G);
  for (std::size_t t = 0; t < G; ++t) {
    origin_series[t] = kmc.mean(static_cast<Eigen::Index>(t), col(spec.origin_spin)) / rep.source;
  }
  if (spec.source == DiffusionSpec::Source::Measured) {
    so.source_at = [&](double t) { return interpolate(kmc.time, origin_series, t); };
  }
  rep.reflective = diffusion::solve_diffusion(rep.D_av, grid, diffusion::Boundary::Reflective, kmc.time, so);
  rep.absorbing = diffusion::solve_diffusion(rep.D_av, grid, diffusion::Boundary::Absorbing, kmc.time, so);
  rep.reflective_contours = diffusion::contour_times(rep.reflective, spec.levels);
  rep.absorbing_contours = diffusion::contour_times(rep.absorbing, spec.levels);

  // Normalized kMC profile on the nuclear positions from the origin onwards.
  diffusion::DiffusionField prof;
  for (std::size_t s = spec.origin_spin; s < n_spins; ++s) prof.x.push_back(along[s - 1] - x0);
  prof.t = kmc.time;
  prof.p.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(prof.x.size()));
  for (std::size_t s = spec.origin_spin; s < n_spins; ++s) {
    prof.p.col(static_cast<Eigen::Index>(s - spec.origin_spin)) = kmc.mean.col(col(s)) / rep.source;
  }
  rep.kmc_contours = diffusion::contour_times(prof, spec.levels);

  const double span = kmc.time.back() - kmc.time.front();
  const double t_min = kmc.time.front() + spec.transient_fraction * span;
  const double t_late = kmc.time.front() + 0.5 * span;
  const std::size_t first = std::max(spec.origin_spin + 1, spec.skip_nuclei + 1);
  double sum_r = 0.0, sum_a = 0.0, late_r = 0.0, late_a = 0.0;
  for (double level : spec.levels) {
    for (std::size_t s = first; s < n_spins; ++s) {
      const auto k = static_cast<Eigen::Index>(s - spec.origin_spin);
      std::vector<double> v(prof.p.col(k).data(), prof.p.col(k).data() + G);
      const auto tk = diffusion::crossing_time(kmc.time, v, level);
      if (!tk || *tk < t_min) continue;
      CrossingRow row;
      row.level = level;
      row.spin = s;
      row.x = prof.x[static_cast<std::size_t>(k)];
      row.t_kmc = *tk;
      row.t_reflective = diffusion::crossing_time(rep.reflective, row.x, level);
      row.t_absorbing = diffusion::crossing_time(rep.absorbing, row.x, level);
      auto err = [&](const std::optional<double>& t) { return t ? std::abs(*t - *tk) / *tk : 1.0; };
      row.err_reflective = err(row.t_reflective);
      row.err_absorbing = err(row.t_absorbing);
      sum_r += row.err_reflective;
      sum_a += row.err_absorbing;
      rep.max_err_reflective = std::max(rep.max_err_reflective, row.err_reflective);
      rep.max_err_absorbing = std::max(rep.max_err_absorbing, row.err_absorbing);
      if (*tk >= t_late) {
        late_r += row.err_reflective;
        late_a += row.err_absorbing;
        ++rep.late_rows;
      }
      rep.rows.push_back(row);
    }
  }
  if (!rep.rows.empty()) {
    rep.mean_err_reflective = sum_r / static_cast<double>(rep.rows.size());
    rep.mean_err_absorbing = sum_a / static_cast<double>(rep.rows.size());
  }
  if (rep.late_rows > 0) {
    rep.late_err_reflective = late_r / static_cast<double>(rep.late_rows);
    rep.late_err_absorbing = late_a / static_cast<double>(rep.late_rows);
  }
  return rep;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  res.config = config;
  res.system = build_system(config);
  const auto& params = res.system.params;
  const auto& couplings = res.system.couplings;
  res.validity = validate_adiabatic(params, couplings, config.validity.threshold);
  if (!res.validity.pass) {
    if (!config.validity.override) throw ValidityError(validity_message(res.validity));
    res.warnings.push_back(validity_message(res.validity) + "; run continued because the override is set");
  }

  const auto grid = config.simulation.time.build();
  kmc::RateOptions ro;
  ro.second_order = config.simulation.second_order;
  const kmc::Model model(params, couplings, ro);

  kmc::EnsembleOptions eo;
  eo.trajectories = config.simulation.trajectories;
  eo.master_seed = config.simulation.seed;
  eo.workers = config.simulation.workers;
  eo.initial = initial_condition(config, model);
  res.kmc = kmc::run_ensemble(model, grid, eo);

  const fs::path dir = config.output_dir;
  auto out = [&](const std::string& name) {
    res.outputs.push_back(dir / name);
    return dir / name;
  };

  json manifest;
  if (config.reference.enabled) {
    res.qme = run_reference(config);
    Tolerance tol;
    tol.sigmas = config.reference.sigmas;
    res.comparison = compare_series(res.kmc.series, res.qme->series, tol);
  }

  if (config.diffusion.enabled) {
    if (!res.system.geometry) throw ConfigError("diffusion comparison needs a chain geometry (system.type: chain)");
    res.diffusion = compare_with_diffusion(res.kmc.series, *res.system.geometry, couplings, params, config.diffusion);
  }

  if (opts.write_outputs) {
    io::write_series(out("kmc.csv"), res.kmc.series);
    io::write_text_atomic(out("nuclear_average.csv"), nuclear_average_csv(res.kmc));
    if (res.system.geometry) io::write_geometry(out("geometry.txt"), *res.system.geometry);
    if (res.qme) {
      io::write_series(out("qme.csv"), res.qme->series);
      io::write_text_atomic(out("comparison.csv"), res.comparison->summary());
    }
    if (config.reference.dump_generator) {
      if (model.n_spins() > 16) throw CapacityError("generator dump limited to 16 spins");
      io::write_matrix(out("generator_kmc.csv"), kmc::classical_generator(model));
      if (model.n_spins() <= qme::max_projection_spins) {
        io::write_matrix(out("generator_projected.csv"), qme::adiabatic_project(params, couplings).generator);
      }
    }
    if (res.diffusion) {
      const auto& d = *res.diffusion;
      io::write_field(out("diffusion_reflective.csv"), d.reflective);
      io::write_field(out("diffusion_absorbing.csv"), d.absorbing);
      io::write_contours(out("contours_kmc.csv"), d.kmc_contours);
      io::write_contours(out("contours_reflective.csv"), d.reflective_contours);
      io::write_contours(out("contours_absorbing.csv"), d.absorbing_contours);
      io::write_text_atomic(out("crossings.csv"), crossings_csv(d));
    }
  }

  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  manifest["config"] = to_json(config);
  manifest["seeds"] = {{"master", config.simulation.seed}, {"derivation", seed_note}};
  manifest["units"] = unit_note;
  manifest["validity"] = validity_json(res.validity, config.validity.override);
  manifest["warnings"] = res.warnings;
  manifest["system"] = {{"spins", model.n_spins()},
                        {"pairs", couplings.pairs().size()},
                        {"omegaI", params.omegaI()},
                        {"P0", model.P0()}};
  manifest["kmc"] = {{"trajectories", res.kmc.series.trajectories},
                     {"candidates", res.kmc.candidates},
                     {"events", res.kmc.events}};
  if (res.qme) {
    const char* used = res.qme->used == qme::PropagationMethod::Spectral      ? "spectral"
                       : res.qme->used == qme::PropagationMethod::Exponential ? "expm"
                                                                              : "rk45";
    manifest["reference"] = {{"method", used},
                             {"max_trace_error", res.qme->max_trace_error},
                             {"max_hermiticity_error", res.qme->max_hermiticity_error}};
    json spins = json::array();
    for (const auto& s : res.comparison->spins) {
      spins.push_back({{"spin", s.spin}, {"max_abs", s.max_abs}, {"max_sigma", s.max_sigma}, {"pass", s.pass}});
    }
    manifest["comparison"] = {{"sigmas", config.reference.sigmas}, {"pass", res.comparison->pass}, {"spins", spins}};
  }
  if (res.diffusion) {
    const auto& d = *res.diffusion;
    manifest["diffusion"] = {{"D_av_A2_per_s", d.D_av},
                             {"source", d.source},
                             {"origin_spin", d.origin_spin},
                             {"length_A", d.length},
                             {"crossings", d.rows.size()},
                             {"mean_rel_error_reflective", d.mean_err_reflective},
                             {"mean_rel_error_absorbing", d.mean_err_absorbing},
                             {"late_rel_error_reflective", d.late_err_reflective},
                             {"late_rel_error_absorbing", d.late_err_absorbing}};
  }
  manifest["wall_seconds"] = res.wall_seconds;
  json files = json::array();
  for (const auto& f : res.outputs) files.push_back(f.filename().string());
  manifest["outputs"] = files;
  if (opts.write_outputs) {
    io::write_text_atomic(out("manifest.json"), manifest.dump(2) + '\n');
    res.kmc.series.manifest = (dir / "manifest.json").string();
  }
  res.manifest = std::move(manifest);
  return res;
}

SweepResult sweep(const ExperimentConfig& base, const std::string& path, const std::vector<std::string>& values,
                  const RunOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  // Resolve every value first so a bad path or value fails before any compute.
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = with_parameter(base, path, v);
    std::string tag = path + "=" + v;
    std::replace_if(tag.begin(), tag.end(), [](char ch) { return ch == ' ' || ch == '/' || ch == '\\'; }, '_');
    c.output_dir = (fs::path(base.output_dir) / tag).string();
    configs.push_back(std::move(c));
  }
  SweepResult sr;
  sr.values = values;
  std::string summary = "value,time,mean,se\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    sr.runs.push_back(run_experiment(configs[i], opts));
    const auto& r = sr.runs.back().kmc;
    for (std::size_t t = 0; t < r.series.time.size(); ++t) {
      summary += values[i] + ',' + io::format_double(r.series.time[t]) + ',' + io::format_double(r.nuclear_mean[t]) +
                 ',' + io::format_double(r.nuclear_se[t]) + '\n';
    }
  }
  if (opts.write_outputs) {
    sr.summary = fs::path(base.output_dir) / "sweep_summary.csv";
    io::write_text_atomic(sr.summary, summary);
  }
  return sr;
}

}  // namespace dnpsim::experiments
