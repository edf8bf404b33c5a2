#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kintran/jet.hpp"

namespace kintran {

// Graded enumeration of derivative multi-indices beta over `dim` variables
// with |beta| <= order, with O(1) rank lookup.  Instances are interned: the
// same (dim, order) pair always returns the same object, so tables built
// against one set can be combined freely.
class MultiIndexSet {
 public:
  using Key = Jet::Key;

  static const MultiIndexSet& get(int dim, int order) {
    if (dim < 0 || dim > Jet::kMaxVars) throw std::invalid_argument("multiindex: bad dimension");
    if (order < 0 || order > 32) throw std::invalid_argument("multiindex: bad order");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<MultiIndexSet>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot.reset(new MultiIndexSet(dim, order));
    return *slot;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<Key>& keys() const { return keys_; }
  const Key& key(std::size_t rank) const { return keys_.at(rank); }

  int rank(const Key& k) const {
    auto it = rank_.find(k);
    if (it == rank_.end()) throw std::out_of_range("multiindex: key outside set");
    return it->second;
  }

  static int total_degree(const Key& k) {
    int s = 0;
    for (int i = 0; i < Jet::kMaxVars; ++i) s += k[i];
    return s;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto b : k) h = (h ^ b) * 1099511628211ull;
      return h;
    }
  };

  MultiIndexSet(int dim, int order) : dim_(dim), order_(order) {
    Key k{};
    for (int deg = 0; deg <= order; ++deg) emit(k, 0, deg);
    for (std::size_t i = 0; i < keys_.size(); ++i) rank_[keys_[i]] = static_cast<int>(i);
  }

  void emit(Key& k, int slot, int remaining) {
    if (slot == dim_) {
      if (remaining == 0) keys_.push_back(k);
      return;
    }
    if (slot == dim_ - 1) {
      k[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(remaining);
      keys_.push_back(k);
      k[static_cast<std::size_t>(slot)] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      k[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(e);
      emit(k, slot + 1, remaining - e);
    }
    k[static_cast<std::size_t>(slot)] = 0;
  }

  int dim_;
  int order_;
  std::vector<Key> keys_;
  std::unordered_map<Key, int, KeyHash> rank_;
};

}  // namespace kintran
