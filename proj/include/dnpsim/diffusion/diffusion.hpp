#pragma once

#include "dnpsim/spin_system.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dnpsim::diffusion {

/// Mean of the nearest-neighbour chain diffusion constants
///
///   D_k = 4 R2I d_k^2 a_k^2 / ((4 R2I)^2 + (A_k - A_{k+1})^2),
///
/// with d_k = d_{k,k+1} (rad/s) and a_k the spacing between nuclei k and k+1
/// in angstrom, so the result is in A^2/s. Throws DomainError if R2I <= 0 and
/// SpecError for fewer than two nuclei or a spacing count other than n - 1.
double average_diffusion_constant(const Couplings& c, std::span<const double> spacings, double R2I);

/// Distances between consecutive nuclei of a chain geometry (A).
std::vector<double> chain_spacings(const Geometry& geom);
/// Distance of every nucleus from the first one along the chain (A).
std::vector<double> chain_positions(const Geometry& geom);

enum class Boundary { Absorbing, Reflective };

struct GridSpec {
  double length = 0.0;    // A
  std::size_t cells = 200;
};

struct SolveOptions {
  /// Dirichlet value at x = 0; without one the near end is reflective too.
  std::optional<double> source = 1.0;
  /// Time-dependent Dirichlet value at x = 0; replaces `source` when set.
  std::function<double(double)> source_at;
  /// Initial profile on the nodes; empty means zero everywhere.
  std::vector<double> initial;
  /// Time steps are halved until the field on the output grid changes by
  /// less than this between successive halvings.
  double refine_tol = 1e-4;
  std::size_t initial_steps = 64;  // over the whole time span
  std::size_t max_halvings = 16;
};

/// p(x, t) on nodes x_i = i L / cells (rows: times, columns: nodes).
struct DiffusionField {
  std::vector<double> x;
  std::vector<double> t;
  Eigen::MatrixXd p;
  Boundary boundary = Boundary::Absorbing;
  std::optional<double> source;  // constant Dirichlet value, if one was used
  double dt = 0.0;             // time step of the accepted solution
  double refinement_change = 0.0;

  /// Linear interpolation of p in x at grid time index ti.
  double at(std::size_t ti, double x_pos) const;
};

/// Backward Euler in time, central differences in space; the far end at
/// x = L is absorbing (p = 0) or reflective (dp/dx = 0). Throws DomainError
/// for D_av < 0. With D_av = 0 the field keeps its initial values.
DiffusionField solve_diffusion(double D_av, const GridSpec& grid, Boundary boundary,
                               std::span<const double> t_grid, const SolveOptions& opts = {});

/// Closed-form semi-infinite solution source * erfc(x / (2 sqrt(D t))).
double erfc_profile(double x, double t, double D, double source);

struct ContourCurve {
  double level = 0.0;
  std::vector<double> t;  // only times where the level is reached
  std::vector<double> x;  // largest x with p(x) = level
};

/// For each level and grid time: the largest x at which p crosses the level,
/// linearly interpolated; x = L when the whole field is above it. Times where
/// the level is nowhere reached are left out.
std::vector<ContourCurve> contour_times(const DiffusionField& field, std::span<const double> levels);

/// First time at which `values` reaches `level` (from below), linearly
/// interpolated between grid times; empty if it never does.
std::optional<double> crossing_time(std::span<const double> t, std::span<const double> values, double level);

/// crossing_time of the field sampled at x_pos.
std::optional<double> crossing_time(const DiffusionField& field, double x_pos, double level);

}  // namespace dnpsim::diffusion
