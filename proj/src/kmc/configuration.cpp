#include "dnpsim/kmc/configuration.hpp"

#include "dnpsim/errors.hpp"

namespace dnpsim::kmc {

Configuration::Configuration(std::size_t n_spins, std::span<const double> A)
    : Configuration(std::vector<std::int8_t>(n_spins, 1), A) {}

Configuration::Configuration(std::vector<std::int8_t> signs, std::span<const double> A)
    : signs_(std::move(signs)) {
  if (signs_.empty()) throw SpecError("configuration needs at least the electron");
  if (A.size() + 1 != signs_.size()) throw SpecError("configuration size does not match couplings");
  for (auto s : signs_) {
    if (s != 1 && s != -1) throw SpecError("spin signs must be +1 or -1");
  }
  hyperfine_sum_ = recompute_hyperfine(A);
}

Configuration Configuration::from_index(std::uint64_t index, std::size_t n_spins, std::span<const double> A) {
  if (n_spins > 63) throw SpecError("basis index only defined for up to 63 spins");
  std::vector<std::int8_t> signs(n_spins);
  for (std::size_t s = 0; s < n_spins; ++s) {
    const bool down = (index >> (n_spins - 1 - s)) & 1U;
    signs[s] = down ? -1 : 1;
  }
  return Configuration(std::move(signs), A);
}

std::uint64_t Configuration::index() const {
  if (signs_.size() > 63) throw SpecError("basis index only defined for up to 63 spins");
  std::uint64_t idx = 0;
  for (auto s : signs_) idx = (idx << 1) | (s < 0 ? 1U : 0U);
  return idx;
}

double Configuration::recompute_hyperfine(std::span<const double> A) const {
  double h = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) h += A[k] * 0.5 * signs_[k + 1];
  return h;
}

double Configuration::total_magnetization() const {
  int sum = 0;
  for (auto s : signs_) sum += s;
  return 0.5 * sum;
}

}  // namespace dnpsim::kmc
