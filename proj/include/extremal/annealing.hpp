#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "extremal/engine.hpp"
#include "extremal/problems.hpp"

namespace extremal {

struct SaSchedule {
  double initial_temperature = 0.0;  // <= 0: tuned so ~target_acceptance of proposals pass
  double target_acceptance = 0.9;
  double cooling = 0.95;             // T <- cooling * T after every stage
  std::uint64_t stage_length = 0;    // 0: 64 n trials per temperature
  double min_temperature = 0.05;     // stop once T falls below this
  std::uint64_t max_trials = 0;      // 0: no trial cap
  double imbalance_weight = -1.0;    // bipartitioning penalty; < 0: 0.05 * mean degree
  // When set, the cooling factor is chosen so the schedule reaches
  // min_temperature exactly when max_trials is exhausted.
  bool fit_cooling_to_budget = false;
};

struct SaResult {
  // Samples hold the (penalized) annealing objective; best_states and
  // best_cost hold the legalized best configuration and its true cost.
  RunTrace trace;
  double initial_temperature = 0.0;
  double final_temperature = 0.0;
  double cooling = 0.0;
  double imbalance_weight = 0.0;
  std::uint64_t stage_length = 0;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
};

using TrialObserver = std::function<void(std::uint64_t trial, const Annealer& state)>;

// Metropolis simulated annealing with a geometric temperature schedule.
SaResult sa_run(const ProblemAdapter& adapter, const SaSchedule& schedule, std::uint64_t seed,
                const TrialObserver& observer = {});

// Temperature at which the mean Metropolis acceptance over `deltas` equals
// `target` (bisection on a log scale).
double temperature_for_acceptance(std::span<const double> deltas, double target);

struct Calibration {
  double eo_seconds_per_step[2] = {0.0, 0.0};
  double sa_seconds_per_trial[2] = {0.0, 0.0};
  std::uint64_t operations = 0;

  double eo_seconds() const { return 0.5 * (eo_seconds_per_step[0] + eo_seconds_per_step[1]); }
  double sa_seconds() const { return 0.5 * (sa_seconds_per_trial[0] + sa_seconds_per_trial[1]); }
};

// Times two passes of EO steps and SA trials on `adapter`; each pass repeats
// blocks of `operations` until it has run for at least 50 ms.
// Throws CalibrationUnstable if the passes differ by more than 20%.
Calibration calibrate(const ProblemAdapter& adapter, const TauPolicy& policy,
                      std::uint64_t operations = 100'000);

struct BudgetPair {
  std::uint64_t eo_steps = 0;
  std::uint64_t sa_trials = 0;
};

// SA trial count taking the same wall time as `eo_steps` EO updates.
BudgetPair equalize_budgets(std::uint64_t eo_steps, double eo_seconds_per_step,
                            double sa_seconds_per_trial);
BudgetPair equalize_budgets(std::uint64_t eo_steps, const Calibration& calibration);

// Default penalty weight for bipartitioning under annealing.
double default_imbalance_weight(const ProblemAdapter& adapter);

}  // namespace extremal
