#include "extremal/annealing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <stdexcept>
#include <vector>

#include "extremal/errors.hpp"

namespace extremal {

double default_imbalance_weight(const ProblemAdapter& adapter) {
  if (adapter.kind() != ProblemKind::bipartition) return 0.0;
  const auto& gbp = static_cast<const BipartitionProblem&>(adapter);
  return 0.05 * gbp.graph().mean_degree();
}

double temperature_for_acceptance(std::span<const double> deltas, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target acceptance must be in (0, 1)");
  std::size_t uphill = 0;
  for (double d : deltas) uphill += d > 0.0;
  if (uphill == 0) return 1.0;
  auto acceptance = [&](double t) {
    double sum = 0.0;
    for (double d : deltas) sum += d > 0.0 ? std::exp(-d / t) : 1.0;
    return sum / static_cast<double>(deltas.size());
  };
  double lo = 1e-6;
  double hi = 1e6;
  if (acceptance(hi) < target) return hi;
  if (acceptance(lo) > target) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (acceptance(mid) < target ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

SaResult sa_run(const ProblemAdapter& adapter, const SaSchedule& schedule, std::uint64_t seed,
                const TrialObserver& observer) {
  const std::size_t n = adapter.size();
  SaResult result;
  result.stage_length = schedule.stage_length > 0 ? schedule.stage_length : 64 * n;
  result.imbalance_weight =
      schedule.imbalance_weight >= 0.0 ? schedule.imbalance_weight : default_imbalance_weight(adapter);
  if (schedule.fit_cooling_to_budget && schedule.max_trials == 0) {
    throw std::invalid_argument("fit_cooling_to_budget needs max_trials");
  }

  Rng rng(seed);
  auto state = adapter.make_annealer(result.imbalance_weight);

  double temperature = schedule.initial_temperature;
  if (temperature <= 0.0) {
    // Probe proposals from random configurations without accepting them.
    state->randomize(rng);
    std::vector<double> deltas;
    const std::size_t probes = std::max<std::size_t>(2000, 4 * n);
    deltas.reserve(probes);
    for (std::size_t i = 0; i < probes; ++i) deltas.push_back(state->propose(rng));
    temperature = temperature_for_acceptance(deltas, schedule.target_acceptance);
  }
  result.initial_temperature = temperature;

  double cooling = schedule.cooling;
  if (schedule.fit_cooling_to_budget) {
    const double stages =
        std::max(1.0, std::floor(static_cast<double>(schedule.max_trials) / static_cast<double>(result.stage_length)));
    cooling = temperature > schedule.min_temperature
                  ? std::pow(schedule.min_temperature / temperature, 1.0 / stages)
                  : 0.5;
  }
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling factor must be in (0, 1)");
  result.cooling = cooling;

  state->randomize(rng);
  double best = state->objective();
  std::vector<State> best_states(state->states().begin(), state->states().end());
  TraceRecorder recorder;
  recorder.record(0, best, best, true);
  if (observer) observer(0, *state);

  std::uint64_t trial = 0;
  std::uint64_t in_stage = 0;
  const bool capped = schedule.max_trials > 0;
  // With a fitted schedule the trial budget, not the temperature floor,
  // ends the run.
  while ((!capped || trial < schedule.max_trials) &&
         (schedule.fit_cooling_to_budget || temperature >= schedule.min_temperature)) {
    ++trial;
    const double delta = state->propose(rng);
    if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature)) {
      state->accept();
      ++result.accepted;
    }
    const double current = state->objective();
    const bool improved = current < best;
    if (improved) {
      best = current;
      best_states.assign(state->states().begin(), state->states().end());
      result.trace.steps_to_best = trial;
    }
    recorder.record(trial, current, best, improved);
    if (observer) observer(trial, *state);
    if (++in_stage == result.stage_length) {
      in_stage = 0;
      temperature *= cooling;
    }
  }
  recorder.finish(trial, state->objective(), best);
  result.trials = trial;
  result.final_temperature = temperature;

  // Report the better of the legalized best and legalized final states.
  std::vector<State> from_best = state->legalize(best_states);
  std::vector<State> from_final = state->legalize(state->states());
  const double cost_best = adapter.cost(from_best);
  const double cost_final = adapter.cost(from_final);
  result.trace.samples = recorder.take();
  if (cost_final < cost_best) {
    result.trace.best_states = std::move(from_final);
    result.trace.best_cost = cost_final;
  } else {
    result.trace.best_states = std::move(from_best);
    result.trace.best_cost = cost_best;
  }
  result.trace.restart_best_costs = {result.trace.best_cost};
  return result;
}

namespace {

std::string format_seconds(const double (&t)[2]) {
  std::ostringstream out;
  out << t[0] << " s vs " << t[1] << " s";
  return out.str();
}

}  // namespace

Calibration calibrate(const ProblemAdapter& adapter, const TauPolicy& policy,
                      std::uint64_t operations) {
  if (operations < 1) throw std::invalid_argument("calibrate: operations must be >= 1");
  using Clock = std::chrono::steady_clock;
  // Short passes are dominated by timer and scheduler noise.
  constexpr std::chrono::milliseconds kMinPass{50};
  Calibration cal;
  cal.operations = operations;
  for (int pass = 0; pass < 2; ++pass) {
    {
      Rng rng(derive_seed(policy.seed(), 1000 + static_cast<std::uint64_t>(pass)));
      Configuration config = adapter.configure(adapter.random_states(rng));
      FitnessLedger ledger = adapter.make_ledger(config);
      std::uint64_t done = 0;
      const auto start = Clock::now();
      do {
        for (std::uint64_t i = 0; i < operations; ++i) eo_step(config, ledger, adapter, policy, rng);
        done += operations;
      } while (Clock::now() - start < kMinPass);
      const std::chrono::duration<double> elapsed = Clock::now() - start;
      cal.eo_seconds_per_step[pass] = elapsed.count() / static_cast<double>(done);
    }
    {
      Rng rng(derive_seed(policy.seed(), 2000 + static_cast<std::uint64_t>(pass)));
      auto state = adapter.make_annealer(default_imbalance_weight(adapter));
      state->randomize(rng);
      const double temperature = 1.0;
      std::uint64_t done = 0;
      const auto start = Clock::now();
      do {
        for (std::uint64_t i = 0; i < operations; ++i) {
          const double delta = state->propose(rng);
          if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature)) state->accept();
        }
        done += operations;
      } while (Clock::now() - start < kMinPass);
      const std::chrono::duration<double> elapsed = Clock::now() - start;
      cal.sa_seconds_per_trial[pass] = elapsed.count() / static_cast<double>(done);
    }
  }
  auto unstable = [](const double (&t)[2]) {
    const double hi = std::max(t[0], t[1]);
    const double lo = std::min(t[0], t[1]);
    return hi > 1.2 * lo;
  };
  if (unstable(cal.eo_seconds_per_step) || unstable(cal.sa_seconds_per_trial)) {
    throw CalibrationUnstable("calibration passes differ by more than 20% (EO " +
                              format_seconds(cal.eo_seconds_per_step) + ", SA " +
                              format_seconds(cal.sa_seconds_per_trial) + ")");
  }
  return cal;
}

BudgetPair equalize_budgets(std::uint64_t eo_steps, double eo_seconds_per_step,
                            double sa_seconds_per_trial) {
  if (!(eo_seconds_per_step > 0.0 && sa_seconds_per_trial > 0.0)) {
    throw std::invalid_argument("equalize_budgets: per-operation times must be positive");
  }
  const double trials = static_cast<double>(eo_steps) * eo_seconds_per_step / sa_seconds_per_trial;
  return {eo_steps, static_cast<std::uint64_t>(std::llround(trials))};
}

BudgetPair equalize_budgets(std::uint64_t eo_steps, const Calibration& calibration) {
  return equalize_budgets(eo_steps, calibration.eo_seconds(), calibration.sa_seconds());
}

}  // namespace extremal
