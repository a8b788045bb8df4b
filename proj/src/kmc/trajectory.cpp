#include "dnpsim/kmc/trajectory.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/kmc/engine.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace dnpsim::kmc {

InitialCondition InitialCondition::thermal(const Model& model) {
  return uniform(model.n_spins(), -model.P0(), 0.0);
}

InitialCondition InitialCondition::uniform(std::size_t n_spins, double electron_p, double nuclear_p) {
  InitialCondition ic;
  ic.polarization.assign(n_spins, nuclear_p);
  if (n_spins > 0) ic.polarization[0] = electron_p;
  return ic;
}

InitialCondition InitialCondition::fixed(std::span<const std::int8_t> signs) {
  InitialCondition ic;
  ic.polarization.reserve(signs.size());
  for (auto s : signs) ic.polarization.push_back(s > 0 ? 1.0 : -1.0);
  return ic;
}

Configuration InitialCondition::sample(const Model& model, Rng& rng) const {
  if (polarization.size() != model.n_spins()) throw SpecError("initial condition size mismatch");
  std::vector<std::int8_t> signs(polarization.size());
  for (std::size_t s = 0; s < signs.size(); ++s) {
    const double p = polarization[s];
    if (!(p >= -1.0 && p <= 1.0)) throw SpecError("initial polarization must be in [-1, 1]");
    if (p == 1.0 || p == -1.0) {
      signs[s] = p > 0 ? 1 : -1;
    } else {
      signs[s] = uniform01(rng) < 0.5 * (1.0 + p) ? 1 : -1;
    }
  }
  return Configuration(std::move(signs), model.couplings().A());
}

namespace {

/// Runs one trajectory and hands each grid sample to `record(t_index, conf)`.
template <typename Record>
void simulate(const Model& model, std::span<const double> grid, Configuration initial, Rng& rng,
              TrajectorySamples& stats, Record&& record) {
  Engine engine(model, std::move(initial));
  std::size_t next = 0;
  const std::size_t G = grid.size();
  while (next < G) {
    if (!(engine.bound_total_rate() > 0.0)) {
      for (; next < G; ++next) record(next, engine.configuration());
      break;
    }
    // The state in effect at a grid time is the one before the next event.
    const double at = engine.time() + engine.draw_wait(rng);
    while (next < G && grid[next] < at) record(next++, engine.configuration());
    if (next >= G) break;
    const auto step = engine.fire(rng);
    ++stats.candidates;
    if (step.accepted) ++stats.events;
  }
}

}  // namespace

TrajectorySamples run_trajectory(const Model& model, std::span<const double> t_grid,
                                 const Configuration& initial, std::uint64_t seed) {
  check_time_grid(t_grid);
  TrajectorySamples out;
  out.n_times = t_grid.size();
  out.n_spins = model.n_spins();
  out.signs.resize(out.n_times * out.n_spins);
  Rng rng(seed);
  simulate(model, t_grid, initial, rng, out, [&](std::size_t t, const Configuration& conf) {
    std::copy(conf.signs().begin(), conf.signs().end(), out.signs.begin() + static_cast<std::ptrdiff_t>(t * out.n_spins));
  });
  return out;
}

EnsembleResult run_ensemble(const Model& model, std::span<const double> t_grid, const EnsembleOptions& opts) {
  check_time_grid(t_grid);
  if (opts.trajectories < 1) throw SpecError("need at least one trajectory");
  const std::size_t G = t_grid.size();
  const std::size_t N = model.n_spins();
  if (opts.collect_histogram && N > 20) throw CapacityError("configuration histogram limited to 20 spins");
  const InitialCondition initial = opts.initial ? *opts.initial : InitialCondition::thermal(model);
  if (initial.polarization.size() != N) throw SpecError("initial condition size mismatch");

  unsigned workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, opts.trajectories));

  struct Partial {
    std::vector<std::uint64_t> up;  // [time][spin]
    std::vector<std::uint64_t> nuc_up, nuc_up_sq;  // per time: sum of u and u^2, u = nuclei up
    std::vector<std::vector<std::uint64_t>> histogram;
    std::uint64_t candidates = 0, events = 0;
  };
  std::vector<Partial> partials(workers);
  std::atomic<std::size_t> next_index{0};

  auto work = [&](Partial& part) {
    part.up.assign(G * N, 0);
    part.nuc_up.assign(G, 0);
    part.nuc_up_sq.assign(G, 0);
    if (opts.collect_histogram) part.histogram.assign(G, std::vector<std::uint64_t>(std::size_t{1} << N, 0));
    TrajectorySamples stats;
    for (std::size_t i = next_index++; i < opts.trajectories; i = next_index++) {
      Rng rng(trajectory_seed(opts.master_seed, i));
      Configuration start = initial.sample(model, rng);
      simulate(model, t_grid, std::move(start), rng, stats, [&](std::size_t t, const Configuration& conf) {
        auto* row = part.up.data() + t * N;
        std::uint64_t u = 0;
        for (std::size_t s = 0; s < N; ++s) {
          const std::uint64_t is_up = conf.sign(s) > 0 ? 1U : 0U;
          row[s] += is_up;
          if (s > 0) u += is_up;
        }
        part.nuc_up[t] += u;
        part.nuc_up_sq[t] += u * u;
        if (opts.collect_histogram) ++part.histogram[t][conf.index()];
      });
    }
    part.candidates = stats.candidates;
    part.events = stats.events;
  };

  if (workers == 1) {
    work(partials[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back([&, w] { work(partials[w]); });
  }

  EnsembleResult res;
  std::vector<std::uint64_t> up(G * N, 0), nuc_up(G, 0), nuc_up_sq(G, 0);
  if (opts.collect_histogram) res.histogram.assign(G, std::vector<std::uint64_t>(std::size_t{1} << N, 0));
  for (const auto& part : partials) {
    for (std::size_t i = 0; i < up.size(); ++i) up[i] += part.up[i];
    for (std::size_t t = 0; t < G; ++t) {
      nuc_up[t] += part.nuc_up[t];
      nuc_up_sq[t] += part.nuc_up_sq[t];
    }
    for (std::size_t t = 0; t < res.histogram.size(); ++t) {
      for (std::size_t c = 0; c < res.histogram[t].size(); ++c) res.histogram[t][c] += part.histogram[t][c];
    }
    res.candidates += part.candidates;
    res.events += part.events;
  }

  auto& s = res.series;
  s.time.assign(t_grid.begin(), t_grid.end());
  s.trajectories = opts.trajectories;
  s.mean.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(N));
  s.se.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(N));
  const double n = static_cast<double>(opts.trajectories);
  for (std::size_t t = 0; t < G; ++t) {
    for (std::size_t sp = 0; sp < N; ++sp) {
      const double ups = static_cast<double>(up[t * N + sp]);
      const double mean = (2.0 * ups - n) / n;
      const auto r = static_cast<Eigen::Index>(t);
      const auto c = static_cast<Eigen::Index>(sp);
      s.mean(r, c) = mean;
      // Sample standard error of +-1 outcomes; a single trajectory reports 0.
      s.se(r, c) = opts.trajectories > 1 ? std::sqrt(std::max(0.0, 1.0 - mean * mean) / (n - 1.0)) : 0.0;
    }
  }
  const double nn = static_cast<double>(N - 1);
  res.nuclear_mean.assign(G, 0.0);
  res.nuclear_se.assign(G, 0.0);
  if (N > 1) {
    for (std::size_t t = 0; t < G; ++t) {
      const double mean_u = static_cast<double>(nuc_up[t]) / n;
      res.nuclear_mean[t] = (2.0 * mean_u - nn) / nn;
      if (opts.trajectories > 1) {
        const double var_u = std::max(0.0, (static_cast<double>(nuc_up_sq[t]) - n * mean_u * mean_u) / (n - 1.0));
        res.nuclear_se[t] = 2.0 / nn * std::sqrt(var_u / n);
      }
    }
  }
  return res;
}

PolarizationSeries average_trajectories(const Model& model, std::span<const double> t_grid, std::size_t n_traj,
                                        std::uint64_t master_seed, unsigned workers) {
  EnsembleOptions opts;
  opts.trajectories = n_traj;
  opts.master_seed = master_seed;
  opts.workers = workers;
  return run_ensemble(model, t_grid, opts).series;
}

}  // namespace dnpsim::kmc
