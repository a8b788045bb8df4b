#pragma once

#include "dnpsim/kmc/configuration.hpp"
#include "dnpsim/kmc/rates.hpp"
#include "dnpsim/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace dnpsim::kmc {

enum class EventKind : std::uint8_t {
  ElectronFlip,  // D(S_+) or D(S_-)
  NuclearFlip,   // D(I_k+) or D(I_k-)
  ISFlipFlop,    // Y_k = I_k+ S_- + I_k- S_+
  IIFlipFlop,    // X_kj = I_k+ I_j- + I_k- I_j+
};

std::string to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::ElectronFlip;
  std::uint32_t k = 0;  // nucleus (NuclearFlip, ISFlipFlop, IIFlipFlop)
  std::uint32_t j = 0;  // second nucleus (IIFlipFlop)
  double rate = 0.0;
};

/// Every event applicable in one configuration, with its current rate.
struct EventTable {
  std::vector<Event> events;
  double total_rate = 0.0;
};

/// Lists the jumps out of `conf`: single flips only away from the current
/// state, flip-flops only for antiparallel partners. IS rates are evaluated
/// with the from-scratch constraint sum of is_flipflop_rate.
EventTable enumerate_events(const Configuration& conf, const Model& model);

/// Picks an event with probability rate / total_rate. Throws StallError if total_rate == 0.
std::size_t select_event(const EventTable& table, Rng& rng);

void apply_event(Configuration& conf, const Event& event, const Model& model);

struct TableStep {
  std::size_t event = 0;
  double waiting_time = 0.0;
};

/// One Gillespie step over an explicit table: waiting time ~ Exp(total_rate),
/// event chosen proportionally to its rate, `conf` updated. The table is
/// not refreshed; enumerate again before the next step.
TableStep kmc_step(Configuration& conf, const EventTable& table, const Model& model, Rng& rng);

/// Dense classical generator over all 2^N configurations, assembled from
/// enumerate_events: G(a, b) is the rate b -> a and columns sum to zero.
/// Limited to N <= 16.
Eigen::MatrixXd classical_generator(const Model& model);

}  // namespace dnpsim::kmc
