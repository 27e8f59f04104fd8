#include "extremal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "extremal/engine.hpp"
#include "extremal/errors.hpp"
#include "extremal/rng.hpp"

namespace extremal {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::unique_ptr<ProblemAdapter> make_adapter(ProblemKind kind, const Instance& instance, int colors,
                                             BipartitionProblem::Partner partner) {
  if (kind == ProblemKind::spin_glass) {
    if (const auto* sg = std::get_if<SpinGlass>(&instance)) {
      return std::make_unique<SpinGlassProblem>(std::make_shared<const SpinGlass>(*sg));
    }
    throw std::invalid_argument("spin glass problem needs a spin glass instance");
  }
  const auto* g = std::get_if<Graph>(&instance);
  if (!g) throw std::invalid_argument("graph problem needs a graph instance");
  auto graph = std::make_shared<const Graph>(*g);
  if (kind == ProblemKind::bipartition) return std::make_unique<BipartitionProblem>(graph, partner);
  return std::make_unique<ColoringProblem>(graph, colors);
}

std::uint64_t instance_seed(const EnsembleSpec& spec, std::size_t index) { return derive_seed(spec.seed, index); }

std::uint64_t run_seed(const EnsembleSpec& spec, std::size_t index, std::size_t run) {
  return derive_seed(instance_seed(spec, index), run + 1);
}

Instance ensemble_instance(const EnsembleSpec& spec, std::size_t index) {
  return generate({spec.generator, spec.n, spec.L, spec.c, instance_seed(spec, index)});
}

std::size_t ensemble_size(const EnsembleSpec& spec) {
  return spec.generator == GeneratorKind::pm_j_cubic ? spec.L * spec.L * spec.L : spec.n;
}

std::vector<std::vector<double>> ensemble_best_costs(const EnsembleSpec& spec, const EoProtocol& protocol) {
  std::vector<std::vector<double>> best(spec.instances, std::vector<double>(protocol.runs));
  parallel_for(
      spec.instances,
      [&](std::size_t i) {
        const auto adapter = make_adapter(spec.problem, ensemble_instance(spec, i), spec.colors);
        RunOptions options;
        options.max_steps = protocol.steps;
        options.restarts = protocol.restarts;
        for (std::size_t r = 0; r < protocol.runs; ++r) {
          const TauPolicy policy(protocol.tau, adapter->size(), run_seed(spec, i, r));
          best[i][r] = run(*adapter, policy, options).best_cost;
        }
      },
      protocol.workers);
  return best;
}

std::vector<SweepRow> sweep_tau(const EnsembleSpec& spec, std::span<const double> taus, const EoProtocol& protocol) {
  std::vector<SweepRow> rows;
  for (double tau : taus) {
    EoProtocol p = protocol;
    p.tau = tau;
    const auto best = ensemble_best_costs(spec, p);
    std::vector<double> flat;
    for (const auto& runs : best) flat.insert(flat.end(), runs.begin(), runs.end());
    const Estimate e = mean_and_stderr(flat);
    rows.push_back({tau, ensemble_size(spec), e.mean, e.stderr_mean});
  }
  return rows;
}

double smoothed_argmin(std::span<const SweepRow> rows, std::size_t half_width) {
  if (rows.empty()) throw std::invalid_argument("smoothed_argmin: no rows");
  const auto best = static_cast<std::size_t>(
      std::min_element(rows.begin(), rows.end(),
                       [](const SweepRow& a, const SweepRow& b) { return a.mean_best_cost < b.mean_best_cost; }) -
      rows.begin());
  const std::size_t lo = best >= half_width ? best - half_width : 0;
  const std::size_t hi = std::min(rows.size() - 1, best + half_width);
  if (hi - lo < 2) return rows[best].tau;
  // Least squares y = a + b x + c x^2 in coordinates centered on the minimum.
  const double x0 = rows[best].tau;
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (std::size_t i = lo; i <= hi; ++i) {
    const double x = rows[i].tau - x0;
    const double y = rows[i].mean_best_cost;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y;
      p *= x;
    }
  }
  // Solve the 3x3 normal equations by Cramer's rule.
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double d = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
  if (std::fabs(d) < 1e-300) return x0;
  const double db = det3(s[0], t[0], s[2], s[1], t[1], s[3], s[2], t[2], s[4]);
  const double dc = det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]);
  const double b = db / d;
  const double c = dc / d;
  if (!(c > 0.0)) return x0;
  const double vertex = x0 - b / (2.0 * c);
  return std::clamp(vertex, rows[lo].tau, rows[hi].tau);
}

CompareRow compare_eo_sa(const EnsembleSpec& spec, const CompareOptions& options) {
  if (spec.problem != ProblemKind::bipartition) throw std::invalid_argument("compare_eo_sa: bipartitioning only");
  CompareRow row;
  row.c = spec.c;
  row.n = ensemble_size(spec);
  if (options.budget) {
    row.eo_steps = options.budget->eo_steps;
    row.sa_trials = options.budget->sa_trials;
  } else {
    const auto adapter = make_adapter(spec.problem, ensemble_instance(spec, 0), spec.colors);
    const TauPolicy policy(options.tau, adapter->size(), spec.seed);
    Calibration cal;
    for (int attempt = 1;; ++attempt) {
      try {
        cal = calibrate(*adapter, policy, options.calibration_operations);
        break;
      } catch (const CalibrationUnstable&) {
        if (attempt >= options.calibration_attempts) throw;
      }
    }
    const BudgetPair b = equalize_budgets(options.eo_steps, cal);
    row.eo_steps = b.eo_steps;
    row.sa_trials = b.sa_trials;
    row.calibration = cal;
  }

  std::vector<double> eo(spec.instances * options.runs);
  std::vector<double> sa(eo.size());
  parallel_for(
      spec.instances,
      [&](std::size_t i) {
        const auto adapter = make_adapter(spec.problem, ensemble_instance(spec, i), spec.colors);
        RunOptions eo_options;
        eo_options.max_steps = row.eo_steps;
        for (std::size_t r = 0; r < options.runs; ++r) {
          const std::uint64_t seed = run_seed(spec, i, r);
          eo[i * options.runs + r] = run(*adapter, TauPolicy(options.tau, adapter->size(), seed), eo_options).best_cost;
          if (options.self_compare) {
            const std::uint64_t other = derive_seed(seed, 0x5a);
            sa[i * options.runs + r] =
                run(*adapter, TauPolicy(options.tau, adapter->size(), other), eo_options).best_cost;
          } else {
            SaSchedule schedule;
            schedule.max_trials = row.sa_trials;
            schedule.fit_cooling_to_budget = true;
            sa[i * options.runs + r] = sa_run(*adapter, schedule, derive_seed(seed, 0x5a)).trace.best_cost;
          }
        }
      },
      options.workers);
  row.eo_mean = mean_and_stderr(eo).mean;
  row.sa_mean = mean_and_stderr(sa).mean;
  row.relative_error = (row.sa_mean - row.eo_mean) / std::max(row.eo_mean, 1.0);
  return row;
}

ScanRow ground_state_scan(const EnsembleSpec& spec, const ScanOptions& options) {
  ScanRow row;
  row.n = ensemble_size(spec);
  row.c = spec.c;
  std::vector<double> cost(spec.instances);
  if (!options.backbone) {
    const auto best = ensemble_best_costs(spec, options.protocol);
    for (std::size_t i = 0; i < best.size(); ++i) cost[i] = *std::min_element(best[i].begin(), best[i].end());
  } else {
    std::vector<double> fraction(spec.instances);
    std::vector<double> saturated(spec.instances);
    parallel_for(
        spec.instances,
        [&](std::size_t i) {
          const auto adapter = make_adapter(spec.problem, ensemble_instance(spec, i), spec.colors);
          const TauPolicy policy(options.protocol.tau, adapter->size(), run_seed(spec, i, 0));
          const GroundStateSet gs = enumerate_ground_states(*adapter, policy, options.enumeration);
          cost[i] = gs.optimal_cost;
          fraction[i] = backbone_fraction(gs);
          saturated[i] = gs.saturated ? 1.0 : 0.0;
        },
        options.protocol.workers);
    const Estimate b = mean_and_stderr(fraction);
    row.backbone = b.mean;
    row.stderr_backbone = b.stderr_mean;
    row.saturated_fraction = mean_and_stderr(saturated).mean;
  }
  const Estimate e = mean_and_stderr(cost);
  row.mean_cost = e.mean;
  row.stderr_cost = e.stderr_mean;
  return row;
}

}  // namespace extremal
