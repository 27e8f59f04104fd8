#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "extremal/rng.hpp"

namespace extremal {

// Bucketed ranking of variables by (doubled) fitness.
//
// Every variable lives in exactly one bucket keyed by its current fitness.
// Rank k is resolved by walking buckets worst-first and accumulating their
// sizes; the variable inside the bucket that holds rank k is drawn uniformly,
// which realizes the random tie-break among equal fitnesses exactly.
class FitnessLedger {
 public:
  FitnessLedger() = default;
  FitnessLedger(int min_key, int max_key, std::span<const int> keys);

  std::size_t size() const { return key_.size(); }
  int key(std::size_t var) const { return key_[var]; }
  int min_key() const { return min_key_; }
  int max_key() const { return min_key_ + static_cast<int>(buckets_.size()) - 1; }

  // Moves var into the bucket for new_key. No-op if the key is unchanged.
  void refile(std::size_t var, int new_key);

  // Variable at worst-first rank k (1-based).
  std::size_t select_by_rank(std::size_t rank, Rng& rng) const;

  // Number of variables whose key is strictly below `key`.
  std::size_t count_below(int key) const;
  std::size_t bucket_size(int key) const;
  std::span<const std::uint32_t> bucket(int key) const;

  int worst_key() const;

  // True when the bucket structure is internally consistent and agrees
  // with `keys`.
  bool consistent_with(std::span<const int> keys) const;

 private:
  std::size_t slot(int key) const;

  int min_key_ = 0;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<std::uint32_t> position_;
  std::vector<int> key_;
};

}  // namespace extremal
