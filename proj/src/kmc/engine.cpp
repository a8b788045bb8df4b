#include "dnpsim/kmc/engine.hpp"

#include "dnpsim/errors.hpp"

#include <algorithm>

namespace dnpsim::kmc {

Engine::Engine(const Model& model, Configuration initial) : model_(&model), conf_(std::move(initial)) {
  const std::size_t n = model.n_nuclei();
  if (conf_.size() != model.n_spins()) throw SpecError("engine: configuration size mismatch");
  conf_.refresh_hyperfine(model.couplings().A());
  nuclear_.reset(n);
  is_up_.reset(n);
  is_down_.reset(n);
  const auto& single = model.single();
  for (std::size_t k = 0; k < n; ++k) {
    const bool up = conf_.nucleus_sign(k) > 0;
    nuclear_.set(k, up ? single.I_minus[k] : single.I_plus[k]);
    (up ? is_up_ : is_down_).set(k, model.is_prefactor(k));
  }
  ii_.reset(model.pair_rates().size());
  for (std::size_t i = 0; i < model.pair_rates().size(); ++i) refresh_pair(static_cast<std::uint32_t>(i));
}

double Engine::electron_rate() const {
  return conf_.electron_sign() > 0 ? model_->single().S_minus : model_->single().S_plus;
}

double Engine::bound_total_rate() const {
  return electron_rate() + nuclear_.total() + is_tree_for_electron().total() + ii_.total();
}

double Engine::exact_total_rate() const {
  const auto table = enumerate_events(conf_, *model_);
  return table.total_rate;
}

void Engine::refresh_pair(std::uint32_t i) {
  const auto& pr = model_->pair_rates()[i];
  const bool antiparallel = conf_.nucleus_sign(pr.k) != conf_.nucleus_sign(pr.j);
  ii_.set(i, antiparallel ? std::max(pr.electron_up, pr.electron_down) : 0.0);
}

void Engine::flip_nucleus(std::uint32_t k) {
  const auto& c = model_->couplings();
  conf_.flip_nucleus(k, c.A(k));
  const bool up = conf_.nucleus_sign(k) > 0;
  nuclear_.set(k, up ? model_->single().I_minus[k] : model_->single().I_plus[k]);
  const double pref = model_->is_prefactor(k);
  if (pref > 0.0) {
    (up ? is_down_ : is_up_).set(k, 0.0);
    (up ? is_up_ : is_down_).set(k, pref);
  }
  for (auto i : model_->pairs_of(k)) refresh_pair(i);

  // Floating-point bookkeeping of the hyperfine sum is re-anchored periodically.
  if (++flips_since_refresh_ >= std::max<std::uint64_t>(4096, model_->n_nuclei())) {
    conf_.refresh_hyperfine(c.A());
    flips_since_refresh_ = 0;
  }
}

Engine::Step Engine::step(Rng& rng) {
  draw_wait(rng);
  return fire(rng);
}

double Engine::draw_wait(Rng& rng) {
  const double total = bound_total_rate();
  if (!(total > 0.0)) throw StallError("kmc: total rate is zero, no event can fire");
  pending_wait_ = exponential(rng, total);
  return pending_wait_;
}

Engine::Step Engine::fire(Rng& rng) {
  if (pending_wait_ < 0.0) draw_wait(rng);
  const double r_e = electron_rate();
  const double r_n = nuclear_.total();
  const SumTree& is_tree = is_tree_for_electron();
  const double r_is = is_tree.total();
  const double r_ii = ii_.total();
  const double total = r_e + r_n + r_is + r_ii;

  Step s;
  s.waiting_time = pending_wait_;
  time_ += s.waiting_time;
  pending_wait_ = -1.0;

  double u = uniform01(rng) * total;
  if (u < r_e || (r_n + r_is + r_ii) <= 0.0) {
    s.kind = EventKind::ElectronFlip;
    s.accepted = true;
    conf_.flip_electron();
    return s;
  }
  u -= r_e;
  if ((u < r_n && r_n > 0.0) || (r_is + r_ii) <= 0.0) {
    s.kind = EventKind::NuclearFlip;
    s.k = static_cast<std::uint32_t>(nuclear_.find(uniform01(rng) * r_n));
    s.accepted = true;
    flip_nucleus(s.k);
    return s;
  }
  u -= r_n;
  if ((u < r_is && r_is > 0.0) || r_ii <= 0.0) {
    s.kind = EventKind::ISFlipFlop;
    s.k = static_cast<std::uint32_t>(is_tree.find(uniform01(rng) * r_is));
    const double H_excl = conf_.hyperfine_sum() - model_->couplings().A(s.k) * conf_.m(s.k + 1);
    const double accept = model_->is_rate_given(s.k, H_excl) / model_->is_prefactor(s.k);
    s.accepted = accept >= 1.0 || uniform01(rng) < accept;
    if (s.accepted) {
      conf_.flip_electron();
      flip_nucleus(s.k);
    }
    return s;
  }
  s.kind = EventKind::IIFlipFlop;
  const auto i = static_cast<std::uint32_t>(ii_.find(uniform01(rng) * r_ii));
  const auto& pr = model_->pair_rates()[i];
  s.k = pr.k;
  s.j = pr.j;
  const double actual = conf_.electron_sign() > 0 ? pr.electron_up : pr.electron_down;
  const double bound = std::max(pr.electron_up, pr.electron_down);
  s.accepted = actual >= bound || uniform01(rng) * bound < actual;
  if (s.accepted) {
    flip_nucleus(pr.k);
    flip_nucleus(pr.j);
  }
  return s;
}

}  // namespace dnpsim::kmc
