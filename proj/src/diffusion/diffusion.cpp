#include "dnpsim/diffusion/diffusion.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/series.hpp"

#include <algorithm>
#include <cmath>

namespace dnpsim::diffusion {

double average_diffusion_constant(const Couplings& c, std::span<const double> spacings, double R2I) {
  const std::size_t n = c.n_nuclei();
  if (n < 2) throw SpecError("diffusion constant needs a chain of at least two nuclei");
  if (spacings.size() != n - 1) throw SpecError("need one spacing per neighbouring pair");
  if (!(R2I > 0.0)) throw DomainError("diffusion constant needs R2I > 0");
  const double w = 4.0 * R2I;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d = c.dipolar(k, k + 1);
    const double dA = c.A(k) - c.A(k + 1);
    const double a = spacings[k];
    sum += w * d * d * a * a / (w * w + dA * dA);
  }
  return sum / static_cast<double>(n - 1);
}

std::vector<double> chain_spacings(const Geometry& geom) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < geom.n_nuclei(); ++k) {
    out.push_back((geom.nucleus(k + 1) - geom.nucleus(k)).norm());
  }
  return out;
}

std::vector<double> chain_positions(const Geometry& geom) {
  std::vector<double> out;
  double x = 0.0;
  for (std::size_t k = 0; k < geom.n_nuclei(); ++k) {
    if (k > 0) x += (geom.nucleus(k) - geom.nucleus(k - 1)).norm();
    out.push_back(x);
  }
  return out;
}

double DiffusionField::at(std::size_t ti, double x_pos) const {
  const std::size_t n = x.size();
  const double h = x[1] - x[0];
  const double clamped = std::clamp(x_pos, x.front(), x.back());
  const auto i = std::min(static_cast<std::size_t>(clamped / h), n - 2);
  const double f = (clamped - x[i]) / h;
  const auto r = static_cast<Eigen::Index>(ti);
  return (1.0 - f) * p(r, static_cast<Eigen::Index>(i)) + f * p(r, static_cast<Eigen::Index>(i + 1));
}

namespace {

/// Solves a tridiagonal system in place (Thomas algorithm); `d` returns the solution.
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

Eigen::MatrixXd march(double D, double h, std::size_t nodes, Boundary boundary, std::span<const double> grid,
                      const SolveOptions& opts, double dt_target) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(nodes));
  const bool dirichlet = opts.source_at || opts.source;
  auto source = [&](double t) { return opts.source_at ? opts.source_at(t) : *opts.source; };
  std::vector<double> p(nodes, 0.0);
  if (!opts.initial.empty()) p = opts.initial;
  if (dirichlet) p[0] = source(grid[0]);
  if (boundary == Boundary::Absorbing) p[nodes - 1] = 0.0;
  out.row(0) = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(nodes)).transpose();

  std::vector<double> a(nodes), b(nodes), c(nodes);
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const double span = grid[gi] - grid[gi - 1];
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_target - 1e-9)));
    const double step = span / static_cast<double>(steps);
    const double r = D * step / (h * h);
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i < nodes; ++i) {
        a[i] = -r;
        b[i] = 1.0 + 2.0 * r;
        c[i] = -r;
      }
      if (dirichlet) {
        a[0] = 0.0, b[0] = 1.0, c[0] = 0.0;
        p[0] = source(s + 1 == steps ? grid[gi] : grid[gi - 1] + static_cast<double>(s + 1) * step);
      } else {
        c[0] = -2.0 * r;  // ghost node p_{-1} = p_1
      }
      if (boundary == Boundary::Absorbing) {
        a[nodes - 1] = 0.0, b[nodes - 1] = 1.0, c[nodes - 1] = 0.0;
        p[nodes - 1] = 0.0;
      } else {
        a[nodes - 1] = -2.0 * r;  // ghost node p_{M+1} = p_{M-1}
        c[nodes - 1] = 0.0;
      }
      a[0] = 0.0;
      thomas(a, b, c, p);
    }
    out.row(static_cast<Eigen::Index>(gi)) =
        Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(nodes)).transpose();
  }
  return out;
}

}  // namespace

DiffusionField solve_diffusion(double D_av, const GridSpec& grid, Boundary boundary,
                               std::span<const double> t_grid, const SolveOptions& opts) {
  if (!(D_av >= 0.0) || !std::isfinite(D_av)) throw DomainError("diffusion constant must be finite and >= 0");
  if (!(grid.length > 0.0) || grid.cells < 2) throw SpecError("diffusion grid needs length > 0 and >= 2 cells");
  check_time_grid(t_grid);
  const std::size_t nodes = grid.cells + 1;
  if (!opts.initial.empty() && opts.initial.size() != nodes) throw SpecError("initial profile size must match the grid");
  const double h = grid.length / static_cast<double>(grid.cells);

  DiffusionField f;
  f.boundary = boundary;
  if (!opts.source_at) f.source = opts.source;
  f.t.assign(t_grid.begin(), t_grid.end());
  for (std::size_t i = 0; i < nodes; ++i) f.x.push_back(static_cast<double>(i) * h);

  const double horizon = t_grid.back();
  double scale = opts.source ? std::abs(*opts.source) : 0.0;
  if (opts.source_at) {
    scale = 0.0;
    for (double t : t_grid) scale = std::max(scale, std::abs(opts.source_at(t)));
  }
  for (double v : opts.initial) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;

  if (horizon == 0.0 || D_av == 0.0) {
    f.p = march(D_av, h, nodes, boundary, t_grid, opts, std::max(horizon, 1.0));
    f.dt = horizon;
    return f;
  }
  double dt = horizon / static_cast<double>(std::max<std::size_t>(opts.initial_steps, 1));
  Eigen::MatrixXd coarse = march(D_av, h, nodes, boundary, t_grid, opts, dt);
  for (std::size_t k = 0; k < opts.max_halvings; ++k) {
    dt *= 0.5;
    Eigen::MatrixXd fine = march(D_av, h, nodes, boundary, t_grid, opts, dt);
    f.refinement_change = (fine - coarse).cwiseAbs().maxCoeff() / scale;
    coarse = std::move(fine);
    if (f.refinement_change < opts.refine_tol) break;
  }
  f.p = std::move(coarse);
  f.dt = dt;
  return f;
}

double erfc_profile(double x, double t, double D, double source) {
  if (t <= 0.0) return x <= 0.0 ? source : 0.0;
  return source * std::erfc(x / (2.0 * std::sqrt(D * t)));
}

std::vector<ContourCurve> contour_times(const DiffusionField& field, std::span<const double> levels) {
  std::vector<ContourCurve> out;
  const auto nodes = static_cast<Eigen::Index>(field.x.size());
  for (double level : levels) {
    ContourCurve cc;
    cc.level = level;
    for (std::size_t ti = 0; ti < field.t.size(); ++ti) {
      const auto row = field.p.row(static_cast<Eigen::Index>(ti));
      Eigen::Index i = nodes - 1;
      while (i >= 0 && row(i) < level) --i;
      if (i < 0) continue;
      double x = field.x[static_cast<std::size_t>(i)];
      if (i < nodes - 1) {
        const double hi = row(i), lo = row(i + 1);
        const auto k = static_cast<std::size_t>(i);
        x += (hi - level) / (hi - lo) * (field.x[k + 1] - field.x[k]);
      }
      cc.t.push_back(field.t[ti]);
      cc.x.push_back(x);
    }
    out.push_back(std::move(cc));
  }
  return out;
}

std::optional<double> crossing_time(std::span<const double> t, std::span<const double> values, double level) {
  if (t.size() != values.size()) throw SpecError("crossing_time: size mismatch");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (values[i] < level) continue;
    if (i == 0) return t[0];
    const double f = (level - values[i - 1]) / (values[i] - values[i - 1]);
    return t[i - 1] + f * (t[i] - t[i - 1]);
  }
  return std::nullopt;
}

std::optional<double> crossing_time(const DiffusionField& field, double x_pos, double level) {
  std::vector<double> v(field.t.size());
  for (std::size_t ti = 0; ti < v.size(); ++ti) v[ti] = field.at(ti, x_pos);
  return crossing_time(field.t, v, level);
}

}  // namespace dnpsim::diffusion
