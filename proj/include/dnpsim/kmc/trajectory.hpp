#pragma once

#include "dnpsim/kmc/configuration.hpp"
#include "dnpsim/kmc/rates.hpp"
#include "dnpsim/random.hpp"
#include "dnpsim/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dnpsim::kmc {

/// Per-spin initial polarization; each spin is drawn up with probability (1 + p)/2.
struct InitialCondition {
  std::vector<double> polarization;

  /// Electron at thermal polarization -P0, nuclei unpolarized.
  static InitialCondition thermal(const Model& model);
  static InitialCondition uniform(std::size_t n_spins, double electron_p, double nuclear_p);
  static InitialCondition fixed(std::span<const std::int8_t> signs);

  Configuration sample(const Model& model, Rng& rng) const;
};

/// States of one trajectory on a grid, row-major [time][spin].
struct TrajectorySamples {
  std::size_t n_times = 0;
  std::size_t n_spins = 0;
  std::vector<std::int8_t> signs;
  std::uint64_t candidates = 0;  // engine steps, rejected ones included
  std::uint64_t events = 0;      // accepted events

  std::int8_t at(std::size_t t, std::size_t spin) const { return signs[t * n_spins + spin]; }
};

/// Simulates from `initial` up to the last grid time. The value recorded at a
/// grid time is the state in effect there (the last state before it). An
/// absorbing configuration (no event can fire) is held to the end.
TrajectorySamples run_trajectory(const Model& model, std::span<const double> t_grid,
                                 const Configuration& initial, std::uint64_t seed);

struct EnsembleOptions {
  std::size_t trajectories = 1;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;                       // 0: hardware concurrency
  std::optional<InitialCondition> initial;    // default: thermal
  bool collect_histogram = false;             // configuration counts, N <= 20
};

struct EnsembleResult {
  PolarizationSeries series;
  /// Average nuclear polarization per grid time and its standard error,
  /// computed from per-trajectory averages (so spin correlations count).
  std::vector<double> nuclear_mean;
  std::vector<double> nuclear_se;
  /// histogram[t][config index] when requested.
  std::vector<std::vector<std::uint64_t>> histogram;
  std::uint64_t candidates = 0;
  std::uint64_t events = 0;
};

/// Trajectory i is seeded with trajectory_seed(master_seed, i) and draws its
/// own initial state. Counts are summed as integers, so the statistics are
/// identical for any worker count.
EnsembleResult run_ensemble(const Model& model, std::span<const double> t_grid, const EnsembleOptions& opts);

PolarizationSeries average_trajectories(const Model& model, std::span<const double> t_grid,
                                        std::size_t n_traj, std::uint64_t master_seed, unsigned workers = 1);

}  // namespace dnpsim::kmc
