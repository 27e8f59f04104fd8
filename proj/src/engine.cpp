#include "extremal/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace extremal {

void TraceRecorder::record(std::uint64_t step, double cost, double best_cost, bool improved) {
  bool keep = improved || step <= kDenseSteps;
  if (step >= next_sparse_) {
    keep = true;
    while (next_sparse_ <= step) {
      next_sparse_ = static_cast<std::uint64_t>(std::ceil(static_cast<double>(next_sparse_) * kThinning));
    }
  }
  if (keep) samples_.push_back({step, cost, best_cost});
}

void TraceRecorder::finish(std::uint64_t step, double cost, double best_cost) {
  if (samples_.empty() || samples_.back().step != step) samples_.push_back({step, cost, best_cost});
}

void eo_step(Configuration& config, FitnessLedger& ledger, const ProblemAdapter& adapter,
             const TauPolicy& policy, Rng& rng) {
  adapter.apply_move(config, ledger, policy, rng);
}

namespace {

RunTrace single_run(const ProblemAdapter& adapter, const TauPolicy& policy, std::size_t restart,
                    const RunOptions& options) {
  Rng rng(derive_seed(policy.seed(), restart));
  Configuration config = adapter.configure(adapter.random_states(rng));
  FitnessLedger ledger = adapter.make_ledger(config);

  RunTrace trace;
  TraceRecorder recorder;
  std::int64_t best2 = config.cost2;
  trace.best_states = config.states;
  recorder.record(0, config.cost(), config.cost(), true);
  if (options.observer) options.observer(restart, 0, config);

  for (std::uint64_t step = 1; step <= options.max_steps; ++step) {
    eo_step(config, ledger, adapter, policy, rng);
    const bool improved = config.cost2 < best2;
    if (improved) {
      best2 = config.cost2;
      trace.best_states = config.states;
      trace.steps_to_best = step;
    }
    recorder.record(step, config.cost(), 0.5 * static_cast<double>(best2), improved);
    if (options.observer) options.observer(restart, step, config);
  }
  recorder.finish(options.max_steps, config.cost(), 0.5 * static_cast<double>(best2));
  trace.samples = recorder.take();
  trace.best_cost = 0.5 * static_cast<double>(best2);
  return trace;
}

}  // namespace

RunTrace run(const ProblemAdapter& adapter, const TauPolicy& policy, const RunOptions& options) {
  if (options.max_steps < 1) throw std::invalid_argument("run: max_steps must be >= 1");
  if (options.restarts < 1) throw std::invalid_argument("run: restarts must be >= 1");
  if (policy.size() != adapter.size()) {
    throw std::invalid_argument("run: policy size does not match the problem size");
  }
  RunTrace best;
  std::vector<double> restart_costs;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    RunTrace trace = single_run(adapter, policy, r, options);
    restart_costs.push_back(trace.best_cost);
    if (r == 0 || trace.best_cost < best.best_cost) {
      best = std::move(trace);
      best.best_restart = r;
    }
  }
  best.restart_best_costs = std::move(restart_costs);
  return best;
}

}  // namespace extremal
