#pragma once

#include "dnpsim/kmc/configuration.hpp"
#include "dnpsim/kmc/event_table.hpp"
#include "dnpsim/kmc/rates.hpp"
#include "dnpsim/kmc/sum_tree.hpp"
#include "dnpsim/random.hpp"

#include <cstdint>

namespace dnpsim::kmc {

/// Incremental Gillespie engine for large systems.
///
/// Event classes and how their rates are kept current:
///  - electron flip: one rate, looked up from the electron sign;
///  - nuclear flips: one tree over nuclei, leaf k updated when k flips;
///  - IS flip-flops: two trees of the unconstrained prefactors, split by the
///    nucleus sign; the electron sign picks which tree is antiparallel, so an
///    electron flip costs O(1). The constraint factor 1/(1 + D_k^2) is applied
///    by thinning against the prefactor, using the cached hyperfine sum;
///  - II flip-flops: one tree over pairs holding max(rate_up, rate_down) for
///    antiparallel pairs; a nuclear flip touches only its own pairs. When the
///    two rates differ (second-order option) the actual rate is thinned.
///
/// Thinning keeps the process exact: a rejected candidate advances the clock
/// without changing the state.
class Engine {
 public:
  Engine(const Model& model, Configuration initial);

  struct Step {
    EventKind kind = EventKind::ElectronFlip;
    std::uint32_t k = 0, j = 0;
    bool accepted = false;
    double waiting_time = 0.0;
  };

  /// Advances by one candidate event. Throws StallError when no event can fire.
  Step step(Rng& rng);

  /// The two halves of step(): draw the waiting time to the next candidate,
  /// then pick and apply it. Callers can observe the state between the two.
  double draw_wait(Rng& rng);
  Step fire(Rng& rng);

  const Configuration& configuration() const { return conf_; }
  double time() const { return time_; }
  /// Sum of the rate bounds the sampler draws from (>= exact_total_rate()).
  double bound_total_rate() const;
  /// Sum of the true rates of all applicable events, recomputed in O(n + pairs).
  double exact_total_rate() const;

 private:
  void flip_nucleus(std::uint32_t k);
  void refresh_pair(std::uint32_t pair);
  double electron_rate() const;
  const SumTree& is_tree_for_electron() const { return conf_.electron_sign() > 0 ? is_down_ : is_up_; }

  const Model* model_;
  Configuration conf_;
  double time_ = 0.0;
  double pending_wait_ = -1.0;
  SumTree nuclear_;
  SumTree is_up_;    // prefactors of nuclei currently up
  SumTree is_down_;  // prefactors of nuclei currently down
  SumTree ii_;
  std::uint64_t flips_since_refresh_ = 0;
};

}  // namespace dnpsim::kmc
