#include "extremal/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "extremal/errors.hpp"

namespace extremal {

BsChain::BsChain(std::size_t n, std::uint64_t seed) : rng_(seed) {
  if (n < 3) throw std::invalid_argument("BsChain: need n >= 3");
  fitness_.resize(n);
  for (double& f : fitness_) f = uniform01(rng_);
  leaves_ = 1;
  while (leaves_ < n) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0);
  for (std::size_t i = 0; i < leaves_; ++i) tree_[leaves_ + i] = std::min(i, n - 1);
  for (std::size_t i = leaves_ - 1; i >= 1; --i) {
    const std::size_t a = tree_[2 * i];
    const std::size_t b = tree_[2 * i + 1];
    tree_[i] = fitness_[b] < fitness_[a] ? b : a;
  }
}

void BsChain::update(std::size_t i) {
  for (std::size_t node = (leaves_ + i) / 2; node >= 1; node /= 2) {
    const std::size_t a = tree_[2 * node];
    const std::size_t b = tree_[2 * node + 1];
    tree_[node] = fitness_[b] < fitness_[a] ? b : a;
  }
}

double BsChain::step() {
  const std::size_t n = fitness_.size();
  const std::size_t m = tree_[1];
  const double min = fitness_[m];
  for (std::size_t i : {(m + n - 1) % n, m, (m + 1) % n}) {
    fitness_[i] = uniform01(rng_);
    update(i);
  }
  ++steps_;
  return min;
}

std::vector<std::uint64_t> histogram01(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram01: need bins >= 1");
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++counts[std::min(b, bins - 1)];
  }
  return counts;
}

double histogram_threshold(std::span<const std::uint64_t> counts) {
  const std::size_t bins = counts.size();
  if (bins < 5) throw std::invalid_argument("histogram_threshold: need >= 5 bins");
  const std::size_t top = bins - bins / 5;
  double plateau = 0.0;
  for (std::size_t i = top; i < bins; ++i) plateau += static_cast<double>(counts[i]);
  plateau /= static_cast<double>(bins - top);
  for (std::size_t i = 0; i < bins; ++i) {
    if (static_cast<double>(counts[i]) >= 0.5 * plateau) {
      return (static_cast<double>(i) + 0.5) / static_cast<double>(bins);
    }
  }
  return 1.0;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

bool ks_same_distribution(std::span<const double> a, std::span<const double> b, double alpha) {
  const double d = ks_statistic({a.begin(), a.end()}, {b.begin(), b.end()});
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((na + nb) / (na * nb));
  return d <= critical;
}

// ---------------------------------------------------------------------------

FlowModel::FlowModel(const JamKernel& fixed) : kernel_([fixed](const std::array<double, 3>&) { return fixed; }) {}

FlowModel FlowModel::barrier() {
  return FlowModel([](const std::array<double, 3>& rho) {
    const double release = std::min(1.0, 0.01 + 4.0 * rho[1]);
    return JamKernel{JamRow{0.0, 1.0, 0.0}, JamRow{1.0, 0.0, 0.0}, JamRow{release, 0.0, 1.0 - release}};
  });
}

FlowModel FlowModel::constant_barrier() {
  return FlowModel(JamKernel{JamRow{0.0, 1.0, 0.0}, JamRow{0.03, 0.0, 0.97}, JamRow{0.1, 0.9, 0.0}});
}

FlowModel FlowModel::identity() {
  return FlowModel(JamKernel{JamRow{1.0, 0.0, 0.0}, JamRow{0.0, 1.0, 0.0}, JamRow{0.0, 0.0, 1.0}});
}

FlowModel FlowModel::absorbing() {
  return FlowModel(JamKernel{JamRow{1.0, 0.0, 0.0}, JamRow{1.0, 0.0, 0.0}, JamRow{1.0, 0.0, 0.0}});
}

std::array<double, 3> jam_selection_probabilities(const std::array<double, 3>& rho, const TauPolicy& policy) {
  const double n = static_cast<double>(policy.size());
  const double a = policy.cumulative_at(rho[2] * n);
  const double b = policy.cumulative_at((rho[2] + rho[1]) * n);
  return {1.0 - b, b - a, a};
}

namespace {

void check_state(const std::array<double, 3>& rho, std::size_t n) {
  if (n < 1) throw std::invalid_argument("JamState: need n >= 1");
  for (double r : rho) {
    if (!(r >= 0.0)) throw std::invalid_argument("JamState: fractions must be non-negative");
  }
  if (std::fabs(rho[0] + rho[1] + rho[2] - 1.0) > 1e-12) {
    throw std::invalid_argument("JamState: fractions must sum to 1");
  }
}

void check_kernel(const JamKernel& k) {
  for (const auto& row : k) {
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) throw MassNotConserved("jam kernel has a negative entry");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw MassNotConserved("jam kernel row does not sum to 1");
  }
}

}  // namespace

std::array<double, 3> jam_selection_probabilities(const JamState& state) {
  check_state(state.rho, state.n);
  return jam_selection_probabilities(state.rho, TauPolicy(state.tau, state.n));
}

JamResult jam_evolve(const JamState& state, const FlowModel& model, const JamOptions& options) {
  check_state(state.rho, state.n);
  const std::size_t n = state.n;
  const TauPolicy policy(state.tau, n);
  const std::uint64_t updates = options.updates == 0 ? 20 * static_cast<std::uint64_t>(n) : options.updates;
  const double unit = 1.0 / static_cast<double>(n);

  JamResult result;
  std::array<double, 3> rho = state.rho;
  // Stochastic mode tracks whole variables.
  std::array<std::int64_t, 3> count{};
  Rng rng(options.seed);
  if (options.stochastic) {
    count[2] = std::llround(rho[2] * static_cast<double>(n));
    count[1] = std::llround(rho[1] * static_cast<double>(n));
    count[0] = static_cast<std::int64_t>(n) - count[1] - count[2];
    if (count[0] < 0) count[0] = 0, count[1] = static_cast<std::int64_t>(n) - count[2];
    for (int a = 0; a < 3; ++a) rho[a] = static_cast<double>(count[a]) * unit;
  }
  auto cost = [&] { return rho[1] + 2.0 * rho[2]; };
  result.trajectory.push_back({0, rho, cost()});

  double acc = 0.0;
  for (std::uint64_t t = 1; t <= updates; ++t) {
    const JamKernel k = model.kernel(rho);
    check_kernel(k);
    if (options.stochastic) {
      const std::size_t rank = policy.sample_rank(uniform01(rng));
      const int from = rank <= static_cast<std::size_t>(count[2])              ? 2
                       : rank <= static_cast<std::size_t>(count[2] + count[1]) ? 1
                                                                               : 0;
      const double u = uniform01(rng);
      int to = 2;
      if (u < k[from][0]) {
        to = 0;
      } else if (u < k[from][0] + k[from][1]) {
        to = 1;
      }
      --count[from];
      ++count[to];
      for (int a = 0; a < 3; ++a) rho[a] = static_cast<double>(count[a]) * unit;
    } else {
      const auto q = jam_selection_probabilities(rho, policy);
      std::array<double, 3> d{};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (a == b) continue;
          const double flow = q[a] * k[a][b] * unit;
          d[a] -= flow;
          d[b] += flow;
        }
      }
      for (int a = 0; a < 3; ++a) rho[a] = std::max(0.0, rho[a] + d[a]);
    }
    if (std::fabs(rho[0] + rho[1] + rho[2] - 1.0) > 1e-9) {
      throw MassNotConserved("jam_evolve: total occupation drifted from 1");
    }
    acc += cost();
    if ((options.record_every != 0 && t % options.record_every == 0) || t == updates) {
      if (result.trajectory.back().step != t) result.trajectory.push_back({t, rho, cost()});
    }
  }
  result.final_state = {rho, n, state.tau};
  result.final_cost = cost();
  result.mean_cost = acc / static_cast<double>(updates);
  return result;
}

double predict_tau_opt(double n, double amplitude) {
  if (!(n >= 2.0) || !(amplitude > 0.0)) throw std::invalid_argument("predict_tau_opt: need n >= 2, A > 0");
  return 1.0 + amplitude / std::log(n);
}

std::vector<JamSweepPoint> jam_tau_sweep(std::size_t n, std::span<const double> taus, const FlowModel& model,
                                         const JamOptions& options, std::array<double, 3> initial) {
  std::vector<JamSweepPoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const JamResult r = jam_evolve(JamState{initial, n, tau}, model, options);
    out.push_back({tau, n, r.final_cost});
  }
  return out;
}

double sweep_argmin(std::span<const JamSweepPoint> sweep) {
  if (sweep.empty()) throw std::invalid_argument("sweep_argmin: empty sweep");
  const auto it = std::min_element(sweep.begin(), sweep.end(), [](const JamSweepPoint& a, const JamSweepPoint& b) {
    return a.mean_cost < b.mean_cost || (a.mean_cost == b.mean_cost && a.tau < b.tau);
  });
  return it->tau;
}

TauOptFit fit_tau_opt(std::span<const double> sizes, std::span<const double> tau_opt) {
  if (sizes.size() != tau_opt.size() || sizes.empty()) throw std::invalid_argument("fit_tau_opt: bad input");
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = 1.0 / std::log(sizes[i]);
    sxx += x * x;
    sxy += x * (tau_opt[i] - 1.0);
  }
  TauOptFit fit;
  fit.amplitude = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double predicted = 1.0 + fit.amplitude / std::log(sizes[i]);
    const double rel = (tau_opt[i] - predicted) / predicted;
    ss += rel * rel;
  }
  fit.relative_residual = std::sqrt(ss / static_cast<double>(sizes.size()));
  return fit;
}

}  // namespace extremal
