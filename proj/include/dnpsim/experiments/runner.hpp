#pragma once

#include "dnpsim/diffusion/diffusion.hpp"
#include "dnpsim/experiments/compare.hpp"
#include "dnpsim/experiments/config.hpp"
#include "dnpsim/kmc/trajectory.hpp"
#include "dnpsim/qme/liouvillian.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dnpsim::experiments {

/// One (nucleus, level) pair of the level-crossing comparison.
struct CrossingRow {
  double level = 0.0;         // fraction of the source level
  std::size_t spin = 0;       // column in the series (1 = first nucleus)
  double x = 0.0;             // A from the origin nucleus
  double t_kmc = 0.0;
  std::optional<double> t_reflective, t_absorbing;
  double err_reflective = 0.0;  // |t_pde - t_kmc| / t_kmc, 1 if the PDE never crosses
  double err_absorbing = 0.0;
};

/// kMC profile of a chain against the source-driven diffusion model.
///
/// The origin spin sits at x = 0 and its late-time mean (last quarter of the
/// grid) is the reference level; polarizations are divided by it. The PDE
/// source follows DiffusionSpec::source. Every nucleus
/// past `skip_nuclei` contributes, for each level, the first time its
/// normalized polarization reaches the level. Crossings before
/// `transient_fraction` of the time span are dropped.
struct DiffusionReport {
  double D_av = 0.0;      // A^2/s
  double source = 0.0;    // reference polarization the profiles are divided by
  std::size_t origin_spin = 1;
  double length = 0.0;    // A, origin to last nucleus
  std::vector<CrossingRow> rows;
  double mean_err_reflective = 0.0;
  double mean_err_absorbing = 0.0;
  double max_err_reflective = 0.0;
  double max_err_absorbing = 0.0;
  /// Same means over crossings in the second half of the span.
  double late_err_reflective = 0.0;
  double late_err_absorbing = 0.0;
  std::size_t late_rows = 0;
  diffusion::DiffusionField reflective, absorbing;
  std::vector<diffusion::ContourCurve> kmc_contours, reflective_contours, absorbing_contours;
};

DiffusionReport compare_with_diffusion(const PolarizationSeries& kmc, const Geometry& geom, const Couplings& c,
                                       const PhysicalParams& p, const DiffusionSpec& spec);

struct RunOptions {
  bool write_outputs = true;
};

struct RunResult {
  ExperimentConfig config;
  BuiltSystem system;
  ValidityReport validity;
  std::vector<std::string> warnings;
  kmc::EnsembleResult kmc;
  std::optional<qme::Propagation> qme;
  std::optional<ComparisonReport> comparison;
  std::optional<DiffusionReport> diffusion;
  nlohmann::json manifest;
  std::vector<std::filesystem::path> outputs;
  double wall_seconds = 0.0;
};

/// Checks validity (ValidityError unless overridden), runs the kMC ensemble,
/// the optional quantum reference and diffusion comparison, and writes the
/// bundle (series CSVs, manifest.json, geometry and generator dumps) into
/// config.output_dir. Series files depend only on the config.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts = {});

/// Validity report for a config without running anything.
ValidityReport check_validity(const ExperimentConfig& config);

/// Quantum reference alone (electron plus up to five nuclei).
qme::Propagation run_reference(const ExperimentConfig& config);

struct SweepResult {
  std::vector<std::string> values;
  std::vector<RunResult> runs;
  std::filesystem::path summary;
};

/// Runs the config once per value of the dotted parameter path, each into
/// <output_dir>/<path>=<value>, with the base master seed. Writes
/// <output_dir>/sweep_summary.csv (value,time,mean,se of the average nuclear
/// polarization). Throws ConfigError for an unknown path.
SweepResult sweep(const ExperimentConfig& base, const std::string& path, const std::vector<std::string>& values,
                  const RunOptions& opts = {});

}  // namespace dnpsim::experiments
