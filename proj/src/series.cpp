#include "dnpsim/series.hpp"

#include "dnpsim/errors.hpp"

#include <cmath>

namespace dnpsim {

void check_time_grid(std::span<const double> grid) {
  if (grid.empty()) throw SpecError("time grid is empty");
  if (grid.front() != 0.0) throw SpecError("time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw SpecError("time grid must be strictly increasing");
  }
  if (!std::isfinite(grid.back())) throw SpecError("time grid must be finite");
}

std::vector<double> linear_grid(double stop, std::size_t points) {
  if (points < 2 || !(stop > 0.0)) throw SpecError("linear grid needs stop > 0 and >= 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = stop * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::vector<double> log_grid(double first, double stop, std::size_t points) {
  if (points < 2 || !(first > 0.0) || !(stop > first)) {
    throw SpecError("log grid needs 0 < first < stop and >= 2 points");
  }
  std::vector<double> g{0.0};
  const std::size_t n = points - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g.push_back(first * std::pow(stop / first, f));
  }
  g.back() = stop;
  return g;
}

}  // namespace dnpsim
