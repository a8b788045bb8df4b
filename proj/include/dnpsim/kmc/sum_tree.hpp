#pragma once

#include <cstddef>
#include <vector>

namespace dnpsim::kmc {

/// Binary tree of partial sums over nonnegative weights.
///
/// Each internal node is recomputed as left + right on every update, so the
/// sums never drift no matter how many updates are applied.
class SumTree {
 public:
  SumTree() = default;
  explicit SumTree(std::size_t size) { reset(size); }

  void reset(std::size_t size) {
    size_ = size;
    leaves_ = 1;
    while (leaves_ < size) leaves_ <<= 1;
    nodes_.assign(2 * leaves_, 0.0);
  }

  std::size_t size() const { return size_; }
  double total() const { return nodes_[1]; }
  double weight(std::size_t i) const { return nodes_[leaves_ + i]; }

  void set(std::size_t i, double w) {
    std::size_t node = leaves_ + i;
    nodes_[node] = w;
    for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }

  /// Leaf whose cumulative interval contains `target` in [0, total()).
  /// Never returns a zero-weight leaf while total() > 0.
  std::size_t find(double target) const {
    std::size_t node = 1;
    while (node < leaves_) {
      const double left = nodes_[2 * node];
      if (target < left || nodes_[2 * node + 1] <= 0.0) {
        node = 2 * node;
      } else {
        target -= left;
        node = 2 * node + 1;
      }
    }
    return node - leaves_;
  }

 private:
  std::size_t size_ = 0;
  std::size_t leaves_ = 1;
  std::vector<double> nodes_{0.0, 0.0};
};

}  // namespace dnpsim::kmc
