#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace extremal {

// Power-law distribution over ranks 1..n, P(k) proportional to k^-tau.
//
// Rank 1 is the worst variable. tau = 0 is a uniform random walk over
// variables; the greedy policy (the tau -> infinity limit) always yields
// rank 1. The cumulative table is normalized so its last entry is exactly 1.
class TauPolicy {
 public:
  TauPolicy(double tau, std::size_t n, std::uint64_t seed = 0);

  static TauPolicy greedy(std::size_t n, std::uint64_t seed = 0);

  double tau() const { return tau_; }
  std::size_t size() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  bool is_greedy() const { return greedy_; }

  // Unnormalized weight k^-tau.
  double weight(std::size_t k) const;

  // Normalized probability of rank k.
  double probability(std::size_t k) const;

  std::span<const double> cumulative_weights() const { return cumulative_; }

  // Cumulative weight of the first x ranks for real x in [0, n]; a
  // fractional rank contributes the matching fraction of its probability.
  double cumulative_at(double x) const;

  // Maps u in [0, 1) to a rank in 1..n by binary search on the table.
  std::size_t sample_rank(double u) const;

  TauPolicy with_seed(std::uint64_t seed) const;

 private:
  TauPolicy() = default;

  double tau_ = 0.0;
  std::size_t n_ = 0;
  std::uint64_t seed_ = 0;
  bool greedy_ = false;
  std::vector<double> cumulative_;
};

}  // namespace extremal
