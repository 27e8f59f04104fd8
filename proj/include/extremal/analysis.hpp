#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "extremal/engine.hpp"
#include "extremal/problems.hpp"
#include "extremal/rank.hpp"

namespace extremal {

// <C_best>(t) ~ c_inf + amplitude * t^-exponent
struct ConvergenceFit {
  double c_inf = 0.0;
  double amplitude = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  // RMS deviation of the fit from the data
};

// Best cost of `trace` after `step` updates (samples keep every improvement).
double best_cost_at(const RunTrace& trace, std::uint64_t step);

// Mean best-cost curve over traces at the given steps.
std::vector<double> mean_best_curve(std::span<const RunTrace> traces, std::span<const std::uint64_t> steps);

// Log-spaced integer steps in [first, last].
std::vector<std::uint64_t> log_spaced_steps(std::uint64_t first, std::uint64_t last, std::size_t count);

// Scans c_inf on a grid of 0.5% of the cost range below the curve and
// fits log(C - c_inf) against log t by least squares for each candidate,
// keeping the candidate with the smallest squared error in C; the best
// grid cell is then refined by golden-section search.
// Throws FitDegenerate when the curve is flat.
ConvergenceFit fit_convergence(std::span<const double> times, std::span<const double> mean_costs);

// Averages >= 20 traces over log-spaced steps spanning >= 3 decades and
// fits the result.
ConvergenceFit fit_convergence(std::span<const RunTrace> traces, std::uint64_t first_step,
                               std::uint64_t last_step, std::size_t points = 40);

struct ScalingPoint {
  std::size_t n = 0;
  double c = 0.0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
};

struct CollapsedPoint {
  std::size_t n = 0;
  double x = 0.0;  // (c - c_crit) n^(1/nu)
  double y = 0.0;  // <C> / n
};

struct ScalingFit {
  double c_crit = 0.0;
  double nu = 0.0;
  double collapse_residual = 0.0;
  std::vector<CollapsedPoint> curves;
};

struct CollapseBox {
  double c_min = 3.0;
  double c_max = 6.0;
  double nu_min = 0.5;
  double nu_max = 3.0;
  std::size_t c_steps = 61;
  std::size_t nu_steps = 51;
};

// Mean squared vertical distance between every point and the piecewise
// linear curve through the pooled points of all other sizes, at the given
// (c_crit, nu). Points outside the other sizes' x-range are skipped.
double collapse_objective(std::span<const ScalingPoint> data, double c_crit, double nu);

// Grid search over the box followed by pattern-search refinement.
// Throws std::invalid_argument with fewer than 3 sizes or 8 connectivities
// and CollapseUnstable when the best grid point sits on the box boundary.
ScalingFit scaling_collapse(std::span<const ScalingPoint> data, const CollapseBox& box = {});

struct GroundStateSet {
  std::string instance_id;
  double optimal_cost = 0.0;
  std::set<std::vector<State>> states;
  bool saturated = false;
  std::size_t runs = 0;
};

struct EnumerationBudget {
  std::size_t runs = 1;
  std::uint64_t steps_per_run = 1;
  std::size_t max_states = 1'000'000;  // beyond this the set is returned unsaturated
};

// Repeats EO runs and keeps every canonical configuration at the best cost
// seen so far (dropping all of them when a better cost appears). The set is
// flagged saturated when the last quarter of the runs added nothing.
GroundStateSet enumerate_ground_states(const ProblemAdapter& adapter, const TauPolicy& policy,
                                       const EnumerationBudget& budget);

// Fraction of vertex pairs whose same/different relation is identical
// across every stored state. Throws EmptySet.
double backbone_fraction(const GroundStateSet& ground_states);

struct BruteForceResult {
  double optimal_cost = 0.0;
  std::vector<std::vector<State>> optima;  // canonical, ascending
  std::uint64_t examined = 0;
};

// Exhaustive search over one representative per symmetry class (balanced
// partitions with vertex 0 on side 0; restricted-growth colorings; spin 0
// fixed up when fields vanish). Throws TooLarge above `limit` candidates.
BruteForceResult brute_force(const ProblemAdapter& adapter, std::uint64_t limit = 1ULL << 24);

// Number of candidates brute_force would examine (saturates at 2^63).
double brute_force_size(const ProblemAdapter& adapter);

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

Estimate mean_and_stderr(std::span<const double> values);

}  // namespace extremal
