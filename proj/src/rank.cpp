#include "extremal/rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace extremal {

TauPolicy::TauPolicy(double tau, std::size_t n, std::uint64_t seed)
    : tau_(tau), n_(n), seed_(seed) {
  if (n == 0) throw std::invalid_argument("TauPolicy: n must be at least 1");
  if (!(tau >= 0.0) || std::isinf(tau)) {
    throw std::invalid_argument("TauPolicy: tau must be finite and >= 0");
  }
  cumulative_.resize(n);
  long double total = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    total += std::pow(static_cast<long double>(k), -static_cast<long double>(tau));
  }
  long double running = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    running += std::pow(static_cast<long double>(k), -static_cast<long double>(tau));
    cumulative_[k - 1] = static_cast<double>(running / total);
  }
  cumulative_.back() = 1.0;
}

TauPolicy TauPolicy::greedy(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("TauPolicy: n must be at least 1");
  TauPolicy p;
  p.tau_ = INFINITY;
  p.n_ = n;
  p.seed_ = seed;
  p.greedy_ = true;
  p.cumulative_.assign(n, 1.0);
  return p;
}

double TauPolicy::weight(std::size_t k) const {
  if (greedy_) return k == 1 ? 1.0 : 0.0;
  return std::pow(static_cast<double>(k), -tau_);
}

double TauPolicy::probability(std::size_t k) const {
  if (k == 0 || k > n_) return 0.0;
  return k == 1 ? cumulative_[0] : cumulative_[k - 1] - cumulative_[k - 2];
}

double TauPolicy::cumulative_at(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= static_cast<double>(n_)) return 1.0;
  const auto whole = static_cast<std::size_t>(std::floor(x));
  const double below = whole == 0 ? 0.0 : cumulative_[whole - 1];
  return below + (x - static_cast<double>(whole)) * probability(whole + 1);
}

std::size_t TauPolicy::sample_rank(double u) const {
  if (greedy_) return 1;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, n_ - 1) + 1;
}

TauPolicy TauPolicy::with_seed(std::uint64_t seed) const {
  TauPolicy p = *this;
  p.seed_ = seed;
  return p;
}

}  // namespace extremal
