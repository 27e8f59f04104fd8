#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "extremal/ledger.hpp"
#include "extremal/problems.hpp"
#include "extremal/rank.hpp"
#include "extremal/rng.hpp"

namespace extremal {

struct TraceSample {
  std::uint64_t step;
  double cost;
  double best_cost;
  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

// Time series of one search plus the best configuration it found.
struct RunTrace {
  std::vector<TraceSample> samples;
  std::vector<State> best_states;
  double best_cost = 0.0;
  std::uint64_t steps_to_best = 0;
  // Best cost of every restart, in restart order; the trace above belongs
  // to the first restart that attained the overall best.
  std::vector<double> restart_best_costs;
  std::size_t best_restart = 0;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

// Records every step up to kDenseSteps, then thins geometrically by a
// factor of 1.1. Steps where the best cost improves are always kept, as is
// the last step passed to finish().
class TraceRecorder {
 public:
  static constexpr std::uint64_t kDenseSteps = 10'000;
  static constexpr double kThinning = 1.1;

  void record(std::uint64_t step, double cost, double best_cost, bool improved);
  void finish(std::uint64_t step, double cost, double best_cost);
  std::vector<TraceSample> take() { return std::move(samples_); }

 private:
  std::vector<TraceSample> samples_;
  std::uint64_t next_sparse_ = kDenseSteps + 1;
};

// Called after every accepted configuration (including the initial one at
// step 0) with the restart index and step count.
using StepObserver = std::function<void(std::size_t restart, std::uint64_t step,
                                        const Configuration& config)>;

struct RunOptions {
  std::uint64_t max_steps = 1;
  std::uint32_t restarts = 1;
  StepObserver observer;
};

// One EO update: the adapter selects through the rank distribution, moves
// unconditionally, and refreshes the affected fitnesses.
void eo_step(Configuration& config, FitnessLedger& ledger, const ProblemAdapter& adapter,
             const TauPolicy& policy, Rng& rng);

// Runs `restarts` independent searches of `max_steps` updates each from
// random initial configurations. Restart r uses derive_seed(policy.seed(), r),
// so the result depends only on (seed, instance, policy).
RunTrace run(const ProblemAdapter& adapter, const TauPolicy& policy, const RunOptions& options);

}  // namespace extremal
