#include "dnpsim/kmc/event_table.hpp"

#include "dnpsim/errors.hpp"

namespace dnpsim::kmc {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ElectronFlip: return "electron-flip";
    case EventKind::NuclearFlip: return "nuclear-flip";
    case EventKind::ISFlipFlop: return "is-flip-flop";
    case EventKind::IIFlipFlop: return "ii-flip-flop";
  }
  return "?";
}

EventTable enumerate_events(const Configuration& conf, const Model& model) {
  const auto& single = model.single();
  const auto& p = model.params();
  const auto& c = model.couplings();
  const std::size_t n = model.n_nuclei();
  EventTable t;
  auto add = [&t](EventKind kind, std::size_t k, std::size_t j, double rate) {
    if (rate > 0.0) {
      t.events.push_back({kind, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j), rate});
    }
  };

  const int se = conf.electron_sign();
  add(EventKind::ElectronFlip, 0, 0, se > 0 ? single.S_minus : single.S_plus);
  for (std::size_t k = 0; k < n; ++k) {
    add(EventKind::NuclearFlip, k, 0, conf.nucleus_sign(k) > 0 ? single.I_minus[k] : single.I_plus[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (conf.nucleus_sign(k) != se) {
      add(EventKind::ISFlipFlop, k, 0, is_flipflop_rate(k, conf, p, c, model.options()));
    }
  }
  for (const auto& pr : model.pair_rates()) {
    if (conf.nucleus_sign(pr.k) != conf.nucleus_sign(pr.j)) {
      add(EventKind::IIFlipFlop, pr.k, pr.j, se > 0 ? pr.electron_up : pr.electron_down);
    }
  }
  for (const auto& e : t.events) t.total_rate += e.rate;
  return t;
}

std::size_t select_event(const EventTable& table, Rng& rng) {
  if (!(table.total_rate > 0.0)) throw StallError("kmc: total rate is zero, no event can fire");
  const double target = uniform01(rng) * table.total_rate;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < table.events.size(); ++i) {
    if (table.events[i].rate <= 0.0) continue;
    acc += table.events[i].rate;
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

void apply_event(Configuration& conf, const Event& e, const Model& model) {
  const auto& c = model.couplings();
  switch (e.kind) {
    case EventKind::ElectronFlip:
      conf.flip_electron();
      break;
    case EventKind::NuclearFlip:
      conf.flip_nucleus(e.k, c.A(e.k));
      break;
    case EventKind::ISFlipFlop:
      conf.flip_electron();
      conf.flip_nucleus(e.k, c.A(e.k));
      break;
    case EventKind::IIFlipFlop:
      conf.flip_nucleus(e.k, c.A(e.k));
      conf.flip_nucleus(e.j, c.A(e.j));
      break;
  }
}

TableStep kmc_step(Configuration& conf, const EventTable& table, const Model& model, Rng& rng) {
  if (!(table.total_rate > 0.0)) throw StallError("kmc: total rate is zero, no event can fire");
  TableStep step;
  step.waiting_time = exponential(rng, table.total_rate);
  step.event = select_event(table, rng);
  apply_event(conf, table.events[step.event], model);
  return step;
}

Eigen::MatrixXd classical_generator(const Model& model) {
  const std::size_t N = model.n_spins();
  if (N > 16) throw CapacityError("classical_generator: at most 16 spins");
  const std::size_t dim = std::size_t{1} << N;
  const auto A = model.couplings().A();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    const auto conf = Configuration::from_index(b, N, A);
    const auto table = enumerate_events(conf, model);
    for (const auto& e : table.events) {
      auto target = conf;
      apply_event(target, e, model);
      const auto a = static_cast<Eigen::Index>(target.index());
      G(a, static_cast<Eigen::Index>(b)) += e.rate;
    }
  }
  // Diagonal as minus the column sum in index order, so it is reproducible
  // from the off-diagonal entries alone.
  for (Eigen::Index b = 0; b < G.cols(); ++b) {
    double out = 0.0;
    for (Eigen::Index a = 0; a < G.rows(); ++a) {
      if (a != b) out += G(a, b);
    }
    G(b, b) = -out;
  }
  return G;
}

}  // namespace dnpsim::kmc
