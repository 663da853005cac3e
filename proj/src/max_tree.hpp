#pragma once
// Segment tree over doubles keeping, per node, the maximum and how many
// leaves attain it. Supports point updates and O(log n) selection among
// tied maxima.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace lilklucb::detail {

class MaxTree {
 public:
  explicit MaxTree(std::size_t n) : n_(n) {
    while (size_ < n) size_ *= 2;
    max_.assign(2 * size_, -std::numeric_limits<double>::infinity());
    count_.assign(2 * size_, 0);
    for (std::size_t i = 0; i < n; ++i) count_[size_ + i] = 1;
    for (std::size_t v = size_ - 1; v >= 1; --v) pull_up(v);
  }

  void set(std::size_t i, double value) {
    std::size_t v = size_ + i;
    max_[v] = value;
    for (v /= 2; v >= 1; v /= 2) pull_up(v);
  }

  [[nodiscard]] double get(std::size_t i) const { return max_[size_ + i]; }
  [[nodiscard]] double max() const { return max_[1]; }
  [[nodiscard]] std::uint64_t ties() const { return count_[1]; }

  /// Index of the j-th (0-based, in index order) leaf attaining the maximum.
  [[nodiscard]] std::size_t select(std::uint64_t j) const {
    const double target = max_[1];
    std::size_t v = 1;
    while (v < size_) {
      const std::size_t l = 2 * v;
      const std::uint64_t left = max_[l] == target ? count_[l] : 0;
      if (j < left) {
        v = l;
      } else {
        j -= left;
        v = l + 1;
      }
    }
    return v - size_;
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

 private:
  void pull_up(std::size_t v) {
    const std::size_t l = 2 * v;
    const std::size_t r = l + 1;
    if (max_[l] > max_[r]) {
      max_[v] = max_[l];
      count_[v] = count_[l];
    } else if (max_[r] > max_[l]) {
      max_[v] = max_[r];
      count_[v] = count_[r];
    } else {
      max_[v] = max_[l];
      count_[v] = count_[l] + count_[r];
    }
  }

  std::size_t n_;
  std::size_t size_ = 1;
  std::vector<double> max_;
  std::vector<std::uint64_t> count_;
};

}  // namespace lilklucb::detail
