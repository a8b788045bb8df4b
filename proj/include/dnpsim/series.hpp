#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dnpsim {

/// Per-spin polarization p = 2<m> on a time grid.
///
/// Rows of `mean`/`se` are grid times, columns are spins (electron first).
/// `trajectories == 0` marks a deterministic series (quantum reference),
/// whose standard errors are all zero; a single trajectory also reports 0.
struct PolarizationSeries {
  std::vector<double> time;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd se;
  std::size_t trajectories = 0;
  std::string manifest;  // path of the run manifest, when written

  std::size_t n_times() const { return time.size(); }
  std::size_t n_spins() const { return static_cast<std::size_t>(mean.cols()); }
};

/// Throws SpecError unless the grid is non-empty, starts at 0 and increases strictly.
void check_time_grid(std::span<const double> grid);

std::vector<double> linear_grid(double stop, std::size_t points);
/// 0 followed by `points - 1` log-spaced times from `first` to `stop`.
std::vector<double> log_grid(double first, double stop, std::size_t points);

}  // namespace dnpsim
