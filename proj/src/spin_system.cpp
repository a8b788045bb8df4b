#include "dnpsim/spin_system.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/random.hpp"
#include "dnpsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnpsim {

double PhysicalParams::omegaS() const { return std::abs(gamma_e) * B0; }

double PhysicalParams::omegaI() const {
  return omegaI_override ? *omegaI_override : std::abs(gamma_n) * B0;
}

double PhysicalParams::P0() const { return thermal_polarization(*this); }

void PhysicalParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(what);
  };
  require(std::isfinite(B0) && B0 > 0.0, "B0 must be positive");
  require(std::isfinite(temperature) && temperature > 0.0, "temperature must be positive");
  require(R1S >= 0.0 && R2S >= 0.0 && R1I >= 0.0 && R2I >= 0.0, "relaxation rates must be >= 0");
  require(std::isfinite(omega1) && omega1 >= 0.0, "omega1 must be >= 0");
  require(std::isfinite(lambda), "lambda must be finite");
  require(omegaI() > 0.0, "omegaI must be positive");
}

double thermal_polarization(const PhysicalParams& params) {
  if (!(params.temperature > 0.0)) {
    throw DomainError("thermal_polarization: temperature must be positive");
  }
  const double x = constants::hbar * params.omegaS() / (2.0 * constants::k_B * params.temperature);
  return std::tanh(x);
}

// ---------------------------------------------------------------------------

Geometry::Geometry(std::vector<Vec3> positions) : positions_(std::move(positions)) {
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!positions_[i].allFinite()) {
      throw GeometryError("site " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  constexpr double min_sq = 0.1 * 0.1;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_.size(); ++j) {
      if ((positions_[i] - positions_[j]).squaredNorm() <= min_sq) {
        throw GeometryError("sites " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide (distance <= 0.1 A)");
      }
    }
  }
}

// ---------------------------------------------------------------------------

Couplings::Couplings(std::vector<double> A, std::vector<double> Bsq, std::vector<DipolarPair> pairs)
    : A_(std::move(A)), Bsq_(std::move(Bsq)), pairs_(std::move(pairs)) {
  if (A_.size() != Bsq_.size()) throw DomainError("Couplings: A and Bsq differ in length");
  for (double b : Bsq_) {
    if (!(b >= 0.0)) throw DomainError("Couplings: Bsq must be >= 0");
  }
  for (auto& p : pairs_) {
    if (p.k == p.j) throw DomainError("Couplings: self pair");
    if (p.k > p.j) std::swap(p.k, p.j);
    if (p.j >= A_.size()) throw DomainError("Couplings: pair index out of range");
  }
  std::sort(pairs_.begin(), pairs_.end(),
            [](const DipolarPair& a, const DipolarPair& b) { return std::tie(a.k, a.j) < std::tie(b.k, b.j); });
  for (std::size_t i = 1; i < pairs_.size(); ++i) {
    if (pairs_[i].k == pairs_[i - 1].k && pairs_[i].j == pairs_[i - 1].j) {
      throw DomainError("Couplings: duplicate pair");
    }
  }
}

double Couplings::dipolar(std::size_t k, std::size_t j) const {
  if (k == j) return 0.0;
  const auto lo = static_cast<std::uint32_t>(std::min(k, j));
  const auto hi = static_cast<std::uint32_t>(std::max(k, j));
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{lo, hi},
                             [](const DipolarPair& p, const std::pair<std::uint32_t, std::uint32_t>& key) {
                               return std::tie(p.k, p.j) < std::tie(key.first, key.second);
                             });
  if (it != pairs_.end() && it->k == lo && it->j == hi) return it->d;
  return 0.0;
}

Couplings Couplings::with_dipolar_scaled(double factor, bool bulk_only) const {
  auto pairs = pairs_;
  for (auto& p : pairs) {
    if (bulk_only && (p.k == 0 || p.j == 0)) continue;
    p.d *= factor;
  }
  return Couplings(A_, Bsq_, std::move(pairs));
}

Couplings Couplings::with_pseudosecular_scaled(std::size_t k, double factor) const {
  auto bsq = Bsq_;
  bsq.at(k) *= factor * factor;
  return Couplings(A_, std::move(bsq), pairs_);
}

// ---------------------------------------------------------------------------

Couplings compute_couplings(const Geometry& geom, const PhysicalParams& params, double pair_cutoff) {
  using namespace constants;
  const std::size_t n = geom.n_nuclei();
  const double gn = std::abs(params.gamma_n);
  const double C_en = mu0_over_4pi * std::abs(params.gamma_e) * gn * hbar;
  const double C_nn = mu0_over_4pi * gn * gn * hbar;

  std::vector<double> A(n), Bsq(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 v = geom.nucleus(k) - geom.electron();
    const double r = v.norm();
    const double cos_t = v.z() / r;
    const double sin_cos = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t)) * cos_t;
    const double r3 = std::pow(r * angstrom, 3);
    A[k] = C_en * (3.0 * cos_t * cos_t - 1.0) / r3;
    const double b = C_en * 3.0 * sin_cos / r3;
    Bsq[k] = b * b;
  }

  std::vector<DipolarPair> pairs;
  const double cutoff_sq = pair_cutoff * pair_cutoff;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      const Vec3 v = geom.nucleus(j) - geom.nucleus(k);
      const double r2 = v.squaredNorm();
      if (r2 > cutoff_sq) continue;
      const double r = std::sqrt(r2);
      const double cos_t = v.z() / r;
      const double d = C_nn * (1.0 - 3.0 * cos_t * cos_t) / (2.0 * std::pow(r * angstrom, 3));
      pairs.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j), d});
    }
  }
  return Couplings(std::move(A), std::move(Bsq), std::move(pairs));
}

// ---------------------------------------------------------------------------

namespace {

Vec3 jitter_vector(Rng& rng, double amplitude) {
  Vec3 v;
  for (int c = 0; c < 3; ++c) v[c] = amplitude * (2.0 * uniform01(rng) - 1.0);
  return v;
}

void check_jitter(double jitter) {
  if (!(jitter >= 0.0 && jitter < 0.5)) throw SpecError("jitter fraction must be in [0, 0.5)");
}

}  // namespace

Geometry generate_lattice(const LatticeSpec& spec) {
  return std::visit(
      [](const auto& s) -> Geometry {
        using T = std::decay_t<decltype(s)>;
        check_jitter(s.jitter);
        if (!(s.spacing > 0.0)) throw SpecError("lattice spacing must be positive");
        Rng rng(s.seed);
        std::vector<Vec3> pos;
        const double amp = s.jitter * s.spacing;
        if constexpr (std::is_same_v<T, CubicLatticeSpec>) {
          if (s.m < 1 || s.m % 2 == 0) throw SpecError("cubic lattice needs odd m (unique center)");
          const int half = s.m / 2;
          pos.reserve(static_cast<std::size_t>(s.m) * s.m * s.m);
          pos.push_back(Vec3::Zero());
          for (int ix = -half; ix <= half; ++ix) {
            for (int iy = -half; iy <= half; ++iy) {
              for (int iz = -half; iz <= half; ++iz) {
                if (ix == 0 && iy == 0 && iz == 0) continue;
                Vec3 p = s.spacing * Vec3(ix, iy, iz);
                pos.push_back(p + jitter_vector(rng, amp));
              }
            }
          }
        } else {
          if (s.n_sites < 1) throw SpecError("chain needs at least one site");
          const Vec3 axis(std::sin(s.angle), 0.0, std::cos(s.angle));
          pos.push_back(Vec3::Zero());
          for (int i = 1; i < s.n_sites; ++i) {
            pos.push_back(i * s.spacing * axis + jitter_vector(rng, amp));
          }
        }
        return Geometry(std::move(pos));
      },
      spec);
}

// ---------------------------------------------------------------------------

ValidityReport validate_adiabatic(const PhysicalParams& p, const Couplings& c, double threshold) {
  ValidityReport rep;
  rep.threshold = threshold;
  rep.lhs = std::min(std::pow(2.0 * p.R2I, 2), std::pow(p.R2S + p.R2I, 2));

  const double wI = p.omegaI();
  double d_term = 0.0, b_term = 0.0, max_coupling = 0.0;
  for (const auto& pr : c.pairs()) {
    d_term = std::max(d_term, pr.d * pr.d / 4.0);
    max_coupling = std::max(max_coupling, std::abs(pr.d));
  }
  for (std::size_t k = 0; k < c.n_nuclei(); ++k) {
    b_term = std::max(b_term, p.omega1 * p.omega1 * c.Bsq(k) / (16.0 * wI * wI));
    max_coupling = std::max({max_coupling, std::abs(c.A(k)), std::sqrt(c.Bsq(k))});
  }
  const std::pair<double, const char*> terms[] = {
      {d_term, "d^2/4"}, {b_term, "|w1 B|^2/(16 wI^2)"}, {p.R1S * p.R1S, "R1S^2"}, {p.R1I * p.R1I, "R1I^2"}};
  rep.dominant = "none";
  for (const auto& [v, name] : terms) {
    if (v > rep.rhs) {
      rep.rhs = v;
      rep.dominant = name;
    }
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : std::numeric_limits<double>::infinity();
  rep.pass = rep.ratio >= threshold;

  const double scale = std::max({max_coupling, p.omega1, std::abs(p.lambda), p.R1S, p.R2S, p.R1I, p.R2I});
  rep.epsilon = scale / wI;
  return rep;
}

}  // namespace dnpsim
