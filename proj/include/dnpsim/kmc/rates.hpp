#pragma once

#include "dnpsim/kmc/configuration.hpp"
#include "dnpsim/spin_system.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dnpsim::kmc {

struct RateOptions {
  /// Adds the omegaI^-1 shifts to the IS and II constraint operators:
  ///   D_k  += (4 w1^2 - |B_k|^2) / (8 wI)
  ///   C_kj += (|B_k|^2 - |B_j|^2) / (8 wI)
  /// With it on, II rates depend on the electron state.
  bool second_order = false;
};

struct SingleSpinRates {
  double S_plus = 0.0;   // electron flips up
  double S_minus = 0.0;  // electron flips down
  std::vector<double> I_plus;   // nucleus k flips up
  std::vector<double> I_minus;  // nucleus k flips down
};

/// Constant single-spin rates:
///   Gamma^S_(+/-) = (1 -/+ P0)/2 R1S + w1^2/(2 wI^2) R2S
///   Gamma^I_k(+/-) = R1I/2 + |B_k|^2/(8 wI^2) R2I
SingleSpinRates single_spin_rates(const PhysicalParams& params, const Couplings& c);

/// Electron-nucleus flip-flop rate of nucleus k in `conf`:
///   w1^2 |B_k|^2 / (8 wI^2 (R2S + R2I)) / (1 + D_k^2),
///   D_k = (lambda + sum_{s != k} A_s m_s) / (R2S + R2I).
/// Independent of the electron state and of m_k; the sum is evaluated afresh.
double is_flipflop_rate(std::size_t k, const Configuration& conf, const PhysicalParams& params,
                        const Couplings& c, const RateOptions& opts = {});

/// Nuclear flip-flop rate for pair (k, j) with electron projection m_S = +-1/2:
///   d_kj^2/(4 R2I) / (1 + ((A_k - A_j) m_S / (2 R2I))^2).
double ii_flipflop_rate(std::size_t k, std::size_t j, double m_S, const PhysicalParams& params,
                        const Couplings& c, const RateOptions& opts = {});

/// Rates of one system, precomputed for the event enumeration and the engine.
class Model {
 public:
  struct PairRates {
    std::uint32_t k = 0, j = 0;
    double electron_up = 0.0;    // rate when m_S = +1/2
    double electron_down = 0.0;  // rate when m_S = -1/2
  };

  Model(PhysicalParams params, Couplings couplings, RateOptions opts = {});

  const PhysicalParams& params() const { return params_; }
  const Couplings& couplings() const { return couplings_; }
  const RateOptions& options() const { return opts_; }
  std::size_t n_nuclei() const { return couplings_.n_nuclei(); }
  std::size_t n_spins() const { return couplings_.n_nuclei() + 1; }
  double P0() const { return P0_; }

  const SingleSpinRates& single() const { return single_; }
  /// w1^2 |B_k|^2 / (8 wI^2 (R2S + R2I)).
  double is_prefactor(std::size_t k) const { return is_prefactor_[k]; }
  /// lambda plus the optional second-order shift of D_k.
  double is_offset(std::size_t k) const { return is_offset_[k]; }
  double is_linewidth() const { return gamma2_; }
  /// IS rate of nucleus k given H' = sum_{s != k} A_s m_s.
  double is_rate_given(std::size_t k, double hyperfine_excluding_k) const {
    const double D = (is_offset_[k] + hyperfine_excluding_k) / gamma2_;
    return is_prefactor_[k] / (1.0 + D * D);
  }

  std::span<const PairRates> pair_rates() const { return pair_rates_; }
  /// Indices into pair_rates() of pairs touching nucleus k.
  std::span<const std::uint32_t> pairs_of(std::size_t k) const {
    return {adjacency_.data() + adjacency_offset_[k], adjacency_offset_[k + 1] - adjacency_offset_[k]};
  }

 private:
  PhysicalParams params_;
  Couplings couplings_;
  RateOptions opts_;
  double P0_ = 0.0;
  double gamma2_ = 0.0;
  SingleSpinRates single_;
  std::vector<double> is_prefactor_;
  std::vector<double> is_offset_;
  std::vector<PairRates> pair_rates_;
  std::vector<std::uint32_t> adjacency_;
  std::vector<std::size_t> adjacency_offset_;
};

}  // namespace dnpsim::kmc
