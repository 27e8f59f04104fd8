#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "extremal/analysis.hpp"
#include "extremal/annealing.hpp"
#include "extremal/instances.hpp"
#include "extremal/problems.hpp"

namespace extremal {

// Calls fn(i) for every i in [0, count) on up to `workers` threads
// (0: hardware concurrency). fn must only write to its own slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

std::unique_ptr<ProblemAdapter> make_adapter(
    ProblemKind kind, const Instance& instance, int colors = 3,
    BipartitionProblem::Partner partner = BipartitionProblem::Partner::ranked);

// A family of generated instances; instance i is generated from
// derive_seed(seed, i) and its runs from seeds derived from that.
struct EnsembleSpec {
  ProblemKind problem = ProblemKind::bipartition;
  GeneratorKind generator = GeneratorKind::erdos_renyi;
  std::size_t n = 0;
  std::size_t L = 0;
  double c = 0.0;
  int colors = 3;
  std::size_t instances = 1;
  std::uint64_t seed = 0;
};

std::uint64_t instance_seed(const EnsembleSpec& spec, std::size_t index);
std::uint64_t run_seed(const EnsembleSpec& spec, std::size_t index, std::size_t run);
Instance ensemble_instance(const EnsembleSpec& spec, std::size_t index);
std::size_t ensemble_size(const EnsembleSpec& spec);  // variables per instance

struct EoProtocol {
  double tau = 1.4;
  std::uint64_t steps = 1;
  std::uint32_t restarts = 1;
  std::size_t runs = 1;
  unsigned workers = 0;
};

// best[i][r]: best cost of run r on instance i. Run r uses the same seed
// for every tau, so curves over tau share their random numbers.
std::vector<std::vector<double>> ensemble_best_costs(const EnsembleSpec& spec, const EoProtocol& protocol);

struct SweepRow {
  double tau = 0.0;
  std::size_t n = 0;
  double mean_best_cost = 0.0;
  double stderr_cost = 0.0;
};

// Mean best cost over runs and instances at every tau.
std::vector<SweepRow> sweep_tau(const EnsembleSpec& spec, std::span<const double> taus, const EoProtocol& protocol);

// Vertex of a parabola fitted to the points within `half_width` grid
// positions of the smallest value, clamped to that window.
double smoothed_argmin(std::span<const SweepRow> rows, std::size_t half_width = 3);

struct CompareOptions {
  double tau = 1.4;
  std::uint64_t eo_steps = 1;
  std::size_t runs = 1;
  // Fixed budgets skip the wall-clock calibration (used to replay a run).
  std::optional<BudgetPair> budget;
  std::uint64_t calibration_operations = 100'000;
  int calibration_attempts = 3;  // CalibrationUnstable is rethrown after the last
  bool self_compare = false;  // run EO in place of SA
  unsigned workers = 0;
};

struct CompareRow {
  double c = 0.0;
  std::size_t n = 0;
  double eo_mean = 0.0;
  double sa_mean = 0.0;
  double relative_error = 0.0;  // (sa - eo) / max(eo, 1)
  std::uint64_t eo_steps = 0;
  std::uint64_t sa_trials = 0;
  std::optional<Calibration> calibration;
};

// Equalizes wall time on instance 0, then runs EO and SA on every instance.
// Throws CalibrationUnstable when every calibration attempt is unstable.
CompareRow compare_eo_sa(const EnsembleSpec& spec, const CompareOptions& options);

struct ScanOptions {
  EoProtocol protocol;  // used when the backbone is not measured
  bool backbone = false;
  EnumerationBudget enumeration;  // used when it is
};

struct ScanRow {
  std::size_t n = 0;
  double c = 0.0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double backbone = 0.0;
  double stderr_backbone = 0.0;
  double saturated_fraction = 0.0;
};

// Mean optimal cost over the ensemble, taking each instance's best over the
// protocol's runs. With `backbone` set, every instance is enumerated
// instead and both the cost and the backbone fraction come from its
// ground-state set.
ScanRow ground_state_scan(const EnsembleSpec& spec, const ScanOptions& options);

}  // namespace extremal
