#include "extremal/ledger.hpp"

#include <stdexcept>
#include <string>

namespace extremal {

FitnessLedger::FitnessLedger(int min_key, int max_key, std::span<const int> keys)
    : min_key_(min_key) {
  if (max_key < min_key) throw std::invalid_argument("FitnessLedger: empty key range");
  buckets_.resize(static_cast<std::size_t>(max_key - min_key) + 1);
  position_.resize(keys.size());
  key_.assign(keys.begin(), keys.end());
  for (std::size_t v = 0; v < keys.size(); ++v) {
    auto& b = buckets_[slot(keys[v])];
    position_[v] = static_cast<std::uint32_t>(b.size());
    b.push_back(static_cast<std::uint32_t>(v));
  }
}

std::size_t FitnessLedger::slot(int key) const {
  const long idx = static_cast<long>(key) - min_key_;
  if (idx < 0 || idx >= static_cast<long>(buckets_.size())) {
    throw std::out_of_range("FitnessLedger: key " + std::to_string(key) + " outside [" +
                            std::to_string(min_key_) + ", " + std::to_string(max_key()) + "]");
  }
  return static_cast<std::size_t>(idx);
}

void FitnessLedger::refile(std::size_t var, int new_key) {
  const int old_key = key_[var];
  if (old_key == new_key) return;
  auto& from = buckets_[slot(old_key)];
  auto& to = buckets_[slot(new_key)];
  const std::uint32_t pos = position_[var];
  const std::uint32_t last = from.back();
  from[pos] = last;
  position_[last] = pos;
  from.pop_back();
  position_[var] = static_cast<std::uint32_t>(to.size());
  to.push_back(static_cast<std::uint32_t>(var));
  key_[var] = new_key;
}

std::size_t FitnessLedger::select_by_rank(std::size_t rank, Rng& rng) const {
  std::size_t seen = 0;
  for (const auto& b : buckets_) {
    if (rank <= seen + b.size()) {
      return b.size() == 1 ? b[0] : b[uniform_below(rng, b.size())];
    }
    seen += b.size();
  }
  throw std::out_of_range("FitnessLedger: rank " + std::to_string(rank) + " exceeds " +
                          std::to_string(seen) + " variables");
}

std::size_t FitnessLedger::count_below(int key) const {
  std::size_t total = 0;
  for (int k = min_key_; k < key && k <= max_key(); ++k) total += buckets_[slot(k)].size();
  return total;
}

std::size_t FitnessLedger::bucket_size(int key) const {
  if (key < min_key_ || key > max_key()) return 0;
  return buckets_[slot(key)].size();
}

std::span<const std::uint32_t> FitnessLedger::bucket(int key) const {
  if (key < min_key_ || key > max_key()) return {};
  return buckets_[slot(key)];
}

int FitnessLedger::worst_key() const {
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    if (!buckets_[i].empty()) return min_key_ + static_cast<int>(i);
  }
  throw std::logic_error("FitnessLedger: no variables");
}

bool FitnessLedger::consistent_with(std::span<const int> keys) const {
  if (keys.size() != key_.size()) return false;
  std::size_t filed = 0;
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    const int k = min_key_ + static_cast<int>(i);
    for (std::size_t p = 0; p < buckets_[i].size(); ++p) {
      const auto v = buckets_[i][p];
      if (v >= keys.size() || keys[v] != k || key_[v] != k || position_[v] != p) return false;
    }
    filed += buckets_[i].size();
  }
  return filed == keys.size();
}

}  // namespace extremal
