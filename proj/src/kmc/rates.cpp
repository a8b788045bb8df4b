#include "dnpsim/kmc/rates.hpp"

#include "dnpsim/errors.hpp"

#include <cmath>

namespace dnpsim::kmc {
namespace {

double is_prefactor_of(const PhysicalParams& p, double bsq) {
  const double numerator = p.omega1 * p.omega1 * bsq;
  if (numerator == 0.0) return 0.0;
  const double gamma2 = p.R2S + p.R2I;
  if (!(gamma2 > 0.0)) throw DomainError("IS flip-flop rate needs R2S + R2I > 0");
  const double wI = p.omegaI();
  return numerator / (8.0 * wI * wI * gamma2);
}

double is_offset_of(const PhysicalParams& p, double bsq, const RateOptions& opts) {
  if (!opts.second_order) return p.lambda;
  return p.lambda + (4.0 * p.omega1 * p.omega1 - bsq) / (8.0 * p.omegaI());
}

double ii_shift_of(const PhysicalParams& p, double bsq_k, double bsq_j, const RateOptions& opts) {
  if (!opts.second_order) return 0.0;
  return (bsq_k - bsq_j) / (8.0 * p.omegaI());
}

}  // namespace

SingleSpinRates single_spin_rates(const PhysicalParams& p, const Couplings& c) {
  const double wI = p.omegaI();
  if (!(wI > 0.0)) throw DomainError("single_spin_rates: omegaI must be positive");
  const double P0 = p.P0();
  SingleSpinRates r;
  const double drive = p.omega1 * p.omega1 / (2.0 * wI * wI) * p.R2S;
  r.S_plus = (1.0 - P0) / 2.0 * p.R1S + drive;
  r.S_minus = (1.0 + P0) / 2.0 * p.R1S + drive;
  r.I_plus.resize(c.n_nuclei());
  r.I_minus.resize(c.n_nuclei());
  for (std::size_t k = 0; k < c.n_nuclei(); ++k) {
    const double g = p.R1I / 2.0 + c.Bsq(k) / (8.0 * wI * wI) * p.R2I;
    r.I_plus[k] = g;
    r.I_minus[k] = g;
  }
  return r;
}

double is_flipflop_rate(std::size_t k, const Configuration& conf, const PhysicalParams& p,
                        const Couplings& c, const RateOptions& opts) {
  const double pref = is_prefactor_of(p, c.Bsq(k));
  if (pref == 0.0) return 0.0;
  double others = 0.0;
  for (std::size_t s = 0; s < c.n_nuclei(); ++s) {
    if (s == k) continue;
    others += c.A(s) * conf.m(s + 1);
  }
  const double D = (is_offset_of(p, c.Bsq(k), opts) + others) / (p.R2S + p.R2I);
  return pref / (1.0 + D * D);
}

double ii_flipflop_rate(std::size_t k, std::size_t j, double m_S, const PhysicalParams& p,
                        const Couplings& c, const RateOptions& opts) {
  if (k == j) throw DomainError("ii_flipflop_rate: k == j");
  const double d = c.dipolar(k, j);
  if (!(p.R2I > 0.0)) throw DomainError("ii_flipflop_rate: R2I must be positive");
  const double pref = d * d / (4.0 * p.R2I);
  const double C = ((c.A(k) - c.A(j)) * m_S + ii_shift_of(p, c.Bsq(k), c.Bsq(j), opts)) / (2.0 * p.R2I);
  return pref / (1.0 + C * C);
}

// ---------------------------------------------------------------------------

Model::Model(PhysicalParams params, Couplings couplings, RateOptions opts)
    : params_(std::move(params)), couplings_(std::move(couplings)), opts_(opts) {
  params_.validate();
  P0_ = params_.P0();
  gamma2_ = params_.R2S + params_.R2I;
  single_ = single_spin_rates(params_, couplings_);

  const std::size_t n = couplings_.n_nuclei();
  is_prefactor_.resize(n);
  is_offset_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    is_prefactor_[k] = is_prefactor_of(params_, couplings_.Bsq(k));
    is_offset_[k] = is_offset_of(params_, couplings_.Bsq(k), opts_);
  }

  pair_rates_.reserve(couplings_.pairs().size());
  std::vector<std::size_t> degree(n, 0);
  for (const auto& pr : couplings_.pairs()) {
    if (pr.d == 0.0) continue;
    PairRates r;
    r.k = pr.k;
    r.j = pr.j;
    r.electron_up = ii_flipflop_rate(pr.k, pr.j, +0.5, params_, couplings_, opts_);
    r.electron_down = ii_flipflop_rate(pr.k, pr.j, -0.5, params_, couplings_, opts_);
    pair_rates_.push_back(r);
    ++degree[pr.k];
    ++degree[pr.j];
  }
  adjacency_offset_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) adjacency_offset_[k + 1] = adjacency_offset_[k] + degree[k];
  adjacency_.resize(adjacency_offset_[n]);
  std::vector<std::size_t> fill(adjacency_offset_.begin(), adjacency_offset_.end() - 1);
  for (std::size_t i = 0; i < pair_rates_.size(); ++i) {
    adjacency_[fill[pair_rates_[i].k]++] = static_cast<std::uint32_t>(i);
    adjacency_[fill[pair_rates_[i].j]++] = static_cast<std::uint32_t>(i);
  }
}

}  // namespace dnpsim::kmc
