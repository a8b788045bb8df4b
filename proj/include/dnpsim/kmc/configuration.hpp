#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dnpsim::kmc {

/// Classical Zeeman state: one spin sign per site, electron at index 0.
///
/// Sign +1 is m = +1/2 ("up"), -1 is m = -1/2. The configuration caches
/// H = sum_k A_k m_k over the nuclei; callers that flip nuclei must pass the
/// matching A_k so the cache stays in sync.
class Configuration {
 public:
  Configuration() = default;
  /// All spins up; hyperfine sum computed from `A` (size n_spins - 1).
  Configuration(std::size_t n_spins, std::span<const double> A);
  Configuration(std::vector<std::int8_t> signs, std::span<const double> A);

  /// Small-system basis index: bit (N-1-s) is set when spin s is down, so
  /// index 0 is all-up and the electron is the most significant bit.
  static Configuration from_index(std::uint64_t index, std::size_t n_spins, std::span<const double> A);
  std::uint64_t index() const;

  std::size_t size() const { return signs_.size(); }
  std::int8_t sign(std::size_t spin) const { return signs_[spin]; }
  double m(std::size_t spin) const { return 0.5 * signs_[spin]; }
  std::int8_t electron_sign() const { return signs_[0]; }
  /// Sign of nucleus k (spin k + 1).
  std::int8_t nucleus_sign(std::size_t k) const { return signs_[k + 1]; }
  std::span<const std::int8_t> signs() const { return signs_; }

  double hyperfine_sum() const { return hyperfine_sum_; }
  /// sum_k A_k m_k evaluated from scratch.
  double recompute_hyperfine(std::span<const double> A) const;
  void refresh_hyperfine(std::span<const double> A) { hyperfine_sum_ = recompute_hyperfine(A); }

  void flip_electron() { signs_[0] = static_cast<std::int8_t>(-signs_[0]); }
  void flip_nucleus(std::size_t k, double A_k) {
    auto& s = signs_[k + 1];
    s = static_cast<std::int8_t>(-s);
    hyperfine_sum_ += A_k * s;  // m changes by s (from -s/2 to +s/2)
  }
  /// Sum of m over all spins (electron included).
  double total_magnetization() const;

  bool operator==(const Configuration& o) const { return signs_ == o.signs_; }

 private:
  std::vector<std::int8_t> signs_;
  double hyperfine_sum_ = 0.0;
};

}  // namespace dnpsim::kmc
