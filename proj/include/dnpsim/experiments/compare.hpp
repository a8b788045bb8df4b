#pragma once

#include "dnpsim/series.hpp"

#include <string>
#include <vector>

namespace dnpsim::experiments {

struct Tolerance {
  double sigmas = 3.0;    // allowed deviation in combined standard errors
  double absolute = 0.0;  // added to the allowance, for deterministic pairs
  bool interpolate = false;  // resample b onto a's grid when they differ
};

struct SpinDeviation {
  std::size_t spin = 0;
  double max_abs = 0.0;    // max |a - b| over the grid
  double max_sigma = 0.0;  // max |a - b| / sqrt(se_a^2 + se_b^2); inf if that is 0 and they differ
  double worst_time = 0.0; // where the allowance is exceeded most (or the largest |a - b|)
  bool pass = true;
};

struct ComparisonReport {
  std::vector<SpinDeviation> spins;
  bool pass = true;

  std::vector<std::size_t> failing() const;
  std::string summary() const;
};

/// Per-spin comparison of two polarization series. Throws SpecError when the
/// spin counts differ, or the grids differ and `interpolate` is off (or b does
/// not cover a's grid).
ComparisonReport compare_series(const PolarizationSeries& a, const PolarizationSeries& b, const Tolerance& tol = {});

}  // namespace dnpsim::experiments
