#include "dnpsim/experiments/compare.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/io/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dnpsim::experiments {

std::vector<std::size_t> ComparisonReport::failing() const {
  std::vector<std::size_t> out;
  for (const auto& s : spins) {
    if (!s.pass) out.push_back(s.spin);
  }
  return out;
}

std::string ComparisonReport::summary() const {
  std::string out = "spin,max_abs,max_sigma,worst_time,pass\n";
  for (const auto& s : spins) {
    out += std::to_string(s.spin) + ',' + io::format_double(s.max_abs) + ',' + io::format_double(s.max_sigma) + ',' +
           io::format_double(s.worst_time) + ',' + (s.pass ? "pass" : "FAIL") + '\n';
  }
  return out;
}

namespace {

bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

// b resampled onto `times` by linear interpolation (mean and se alike).
PolarizationSeries resample(const PolarizationSeries& b, const std::vector<double>& times) {
  PolarizationSeries out;
  out.time = times;
  out.trajectories = b.trajectories;
  out.mean.resize(static_cast<Eigen::Index>(times.size()), b.mean.cols());
  out.se.resize(out.mean.rows(), out.mean.cols());
  const double lo = b.time.front(), hi = b.time.back();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < lo - 1e-9 * std::max(1.0, std::abs(lo)) || t > hi + 1e-9 * std::max(1.0, std::abs(hi))) {
      throw SpecError("cannot interpolate: time " + io::format_double(t) + " is outside the other series' grid");
    }
    auto it = std::upper_bound(b.time.begin(), b.time.end(), t);
    std::size_t j = it == b.time.begin() ? 0 : static_cast<std::size_t>(it - b.time.begin()) - 1;
    j = std::min(j, b.time.size() - 1);
    const auto r = static_cast<Eigen::Index>(i);
    if (j + 1 >= b.time.size()) {
      out.mean.row(r) = b.mean.row(static_cast<Eigen::Index>(j));
      out.se.row(r) = b.se.row(static_cast<Eigen::Index>(j));
      continue;
    }
    const double w = (t - b.time[j]) / (b.time[j + 1] - b.time[j]);
    const auto j0 = static_cast<Eigen::Index>(j);
    out.mean.row(r) = (1.0 - w) * b.mean.row(j0) + w * b.mean.row(j0 + 1);
    out.se.row(r) = (1.0 - w) * b.se.row(j0) + w * b.se.row(j0 + 1);
  }
  return out;
}

}  // namespace

ComparisonReport compare_series(const PolarizationSeries& a, const PolarizationSeries& b_in, const Tolerance& tol) {
  if (a.n_spins() != b_in.n_spins()) {
    throw SpecError("spin counts differ (" + std::to_string(a.n_spins()) + " vs " + std::to_string(b_in.n_spins()) + ")");
  }
  if (a.n_times() == 0 || b_in.n_times() == 0) throw SpecError("cannot compare an empty series");
  PolarizationSeries resampled;
  const PolarizationSeries* b = &b_in;
  if (!same_grid(a.time, b_in.time)) {
    if (!tol.interpolate) throw SpecError("time grids differ; pass the interpolate option to resample");
    resampled = resample(b_in, a.time);
    b = &resampled;
  }

  ComparisonReport rep;
  for (std::size_t s = 0; s < a.n_spins(); ++s) {
    SpinDeviation d;
    d.spin = s;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < a.n_times(); ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      const auto c = static_cast<Eigen::Index>(s);
      const double dev = std::abs(a.mean(r, c) - b->mean(r, c));
      const double se = std::hypot(a.se(r, c), b->se(r, c));
      const double sigma = dev == 0.0 ? 0.0 : (se > 0.0 ? dev / se : std::numeric_limits<double>::infinity());
      const double excess = dev - (tol.sigmas * se + tol.absolute);
      if (!(dev <= tol.sigmas * se + tol.absolute)) d.pass = false;  // NaN fails too
      d.max_abs = std::max(d.max_abs, dev);
      d.max_sigma = std::max(d.max_sigma, sigma);
      if (excess > worst_excess) {
        worst_excess = excess;
        d.worst_time = a.time[t];
      }
    }
    rep.pass = rep.pass && d.pass;
    rep.spins.push_back(d);
  }
  return rep;
}

}  // namespace dnpsim::experiments
