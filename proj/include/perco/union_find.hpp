#pragma once

#include <numeric>
#include <utility>
#include <vector>

namespace perco {

/// Disjoint sets with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the surviving root.
  int unite(int a, int b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  int size_of(int x) noexcept { return size_[find(x)]; }
  int element_count() const noexcept { return static_cast<int>(parent_.size()); }

  void reset() noexcept {
    std::iota(parent_.begin(), parent_.end(), 0);
    std::fill(size_.begin(), size_.end(), 1);
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace perco
