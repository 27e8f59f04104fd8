#include "extremal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "extremal/errors.hpp"

namespace extremal {

Estimate mean_and_stderr(std::span<const double> values) {
  Estimate e;
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Convergence

double best_cost_at(const RunTrace& trace, std::uint64_t step) {
  const auto& s = trace.samples;
  if (s.empty()) throw std::invalid_argument("best_cost_at: empty trace");
  auto it = std::upper_bound(s.begin(), s.end(), step,
                             [](std::uint64_t t, const TraceSample& x) { return t < x.step; });
  if (it == s.begin()) return s.front().best_cost;
  return std::prev(it)->best_cost;
}

std::vector<double> mean_best_curve(std::span<const RunTrace> traces, std::span<const std::uint64_t> steps) {
  std::vector<double> mean(steps.size(), 0.0);
  for (const RunTrace& t : traces) {
    for (std::size_t i = 0; i < steps.size(); ++i) mean[i] += best_cost_at(t, steps[i]);
  }
  for (double& m : mean) m /= static_cast<double>(traces.size());
  return mean;
}

std::vector<std::uint64_t> log_spaced_steps(std::uint64_t first, std::uint64_t last, std::size_t count) {
  if (first < 1 || last < first || count < 2) throw std::invalid_argument("log_spaced_steps: bad range");
  std::vector<std::uint64_t> steps;
  const double a = std::log(static_cast<double>(first));
  const double b = std::log(static_cast<double>(last));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    const auto step = static_cast<std::uint64_t>(std::llround(t));
    if (steps.empty() || step > steps.back()) steps.push_back(step);
  }
  return steps;
}

ConvergenceFit fit_convergence(std::span<const double> times, std::span<const double> mean_costs) {
  if (times.size() != mean_costs.size() || times.size() < 3) {
    throw std::invalid_argument("fit_convergence: need >= 3 matching (t, C) points");
  }
  const auto [lo_it, hi_it] = std::minmax_element(mean_costs.begin(), mean_costs.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 1e-12 * std::max(1.0, std::fabs(*hi_it)))) {
    throw FitDegenerate("fit_convergence: averaged curve is flat");
  }
  std::vector<double> log_t(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw std::invalid_argument("fit_convergence: times must be positive");
    log_t[i] = std::log(times[i]);
  }

  const std::size_t m = times.size();
  std::vector<double> log_c(m);
  auto fit_at = [&](double c_inf) {
    for (std::size_t i = 0; i < m; ++i) log_c[i] = std::log(mean_costs[i] - c_inf);
    const double mx = std::accumulate(log_t.begin(), log_t.end(), 0.0) / static_cast<double>(m);
    const double my = std::accumulate(log_c.begin(), log_c.end(), 0.0) / static_cast<double>(m);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (log_t[i] - mx) * (log_t[i] - mx);
      sxy += (log_t[i] - mx) * (log_c[i] - my);
    }
    const double slope = sxy / sxx;
    const double amplitude = std::exp(my - slope * mx);
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double model = c_inf + amplitude * std::exp(slope * log_t[i]);
      sse += (model - mean_costs[i]) * (model - mean_costs[i]);
    }
    return ConvergenceFit{c_inf, amplitude, -slope, std::sqrt(sse / static_cast<double>(m))};
  };

  const double step = 0.005 * range;
  ConvergenceFit best;
  best.residual = std::numeric_limits<double>::infinity();
  int best_k = 1;
  for (int k = 1; k <= 400; ++k) {
    const ConvergenceFit f = fit_at(lo - step * k);
    if (f.residual < best.residual) {
      best = f;
      best_k = k;
    }
  }
  // Golden-section refinement between the neighbouring grid points; the
  // upper end stays strictly below the smallest cost.
  double a = lo - step * (best_k + 1);
  double b = lo - step * std::max(best_k - 1, 0) - (best_k == 1 ? 1e-9 * range : 0.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = fit_at(x1).residual;
  double f2 = fit_at(x2).residual;
  for (int it = 0; it < 100 && b - a > 1e-9 * range; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fit_at(x1).residual;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fit_at(x2).residual;
    }
  }
  const ConvergenceFit refined = fit_at(0.5 * (a + b));
  if (refined.residual < best.residual) best = refined;
  return best;
}

ConvergenceFit fit_convergence(std::span<const RunTrace> traces, std::uint64_t first_step,
                               std::uint64_t last_step, std::size_t points) {
  if (traces.size() < 20) throw std::invalid_argument("fit_convergence: need >= 20 traces");
  if (first_step < 1 || static_cast<double>(last_step) < 1000.0 * static_cast<double>(first_step)) {
    throw std::invalid_argument("fit_convergence: need >= 3 decades of steps");
  }
  const auto steps = log_spaced_steps(first_step, last_step, points);
  const auto curve = mean_best_curve(traces, steps);
  std::vector<double> t(steps.begin(), steps.end());
  return fit_convergence(t, curve);
}

// ---------------------------------------------------------------------------
// Finite-size scaling

namespace {

struct Group {
  std::size_t n;
  std::vector<std::size_t> members;
};

std::vector<Group> group_by_size(std::span<const ScalingPoint> data) {
  std::map<std::size_t, std::vector<std::size_t>> by_n;
  for (std::size_t i = 0; i < data.size(); ++i) by_n[data[i].n].push_back(i);
  std::vector<Group> groups;
  for (auto& [n, members] : by_n) groups.push_back({n, std::move(members)});
  return groups;
}

}  // namespace

double collapse_objective(std::span<const ScalingPoint> data, double c_crit, double nu) {
  const auto groups = group_by_size(data);
  std::vector<double> x(data.size());
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double n = static_cast<double>(data[i].n);
    x[i] = (data[i].c - c_crit) * std::pow(n, 1.0 / nu);
    y[i] = data[i].mean_cost / n;
  }
  double sum = 0.0;
  std::size_t used = 0;
  std::vector<std::pair<double, double>> pool;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    pool.clear();
    for (std::size_t h = 0; h < groups.size(); ++h) {
      if (h == g) continue;
      for (std::size_t i : groups[h].members) pool.emplace_back(x[i], y[i]);
    }
    std::sort(pool.begin(), pool.end());
    for (std::size_t i : groups[g].members) {
      if (pool.size() < 2 || x[i] < pool.front().first || x[i] > pool.back().first) continue;
      auto hi = std::lower_bound(pool.begin(), pool.end(), std::make_pair(x[i], -std::numeric_limits<double>::infinity()));
      if (hi == pool.begin()) ++hi;
      if (hi == pool.end()) --hi;
      const auto lo = std::prev(hi);
      const double span = hi->first - lo->first;
      const double w = span > 0.0 ? (x[i] - lo->first) / span : 0.5;
      const double fit = lo->second + w * (hi->second - lo->second);
      sum += (y[i] - fit) * (y[i] - fit);
      ++used;
    }
  }
  // Too little overlap between sizes means the collapse is not tested.
  if (used < data.size() / 2) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(used);
}

ScalingFit scaling_collapse(std::span<const ScalingPoint> data, const CollapseBox& box) {
  const auto groups = group_by_size(data);
  std::set<double> cs;
  for (const auto& p : data) cs.insert(p.c);
  if (groups.size() < 3) throw std::invalid_argument("scaling_collapse: need >= 3 distinct sizes");
  if (cs.size() < 8) throw std::invalid_argument("scaling_collapse: need >= 8 connectivities");

  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  std::size_t bj = 0;
  auto c_at = [&](std::size_t i) {
    return box.c_min + (box.c_max - box.c_min) * static_cast<double>(i) / static_cast<double>(box.c_steps - 1);
  };
  auto nu_at = [&](std::size_t j) {
    return box.nu_min + (box.nu_max - box.nu_min) * static_cast<double>(j) / static_cast<double>(box.nu_steps - 1);
  };
  for (std::size_t i = 0; i < box.c_steps; ++i) {
    for (std::size_t j = 0; j < box.nu_steps; ++j) {
      const double v = collapse_objective(data, c_at(i), nu_at(j));
      if (v < best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  if (!std::isfinite(best) || bi == 0 || bi + 1 == box.c_steps || bj == 0 || bj + 1 == box.nu_steps) {
    throw CollapseUnstable("scaling_collapse: no interior minimum in the search box");
  }

  double c = c_at(bi);
  double nu = nu_at(bj);
  double dc = (box.c_max - box.c_min) / static_cast<double>(box.c_steps - 1);
  double dnu = (box.nu_max - box.nu_min) / static_cast<double>(box.nu_steps - 1);
  while (dc > 1e-5 || dnu > 1e-5) {
    bool moved = false;
    const double cand[4][2] = {{c + dc, nu}, {c - dc, nu}, {c, nu + dnu}, {c, nu - dnu}};
    for (const auto& p : cand) {
      if (p[0] < box.c_min || p[0] > box.c_max || p[1] < box.nu_min || p[1] > box.nu_max) continue;
      const double v = collapse_objective(data, p[0], p[1]);
      if (v < best) {
        best = v;
        c = p[0];
        nu = p[1];
        moved = true;
      }
    }
    if (!moved) {
      dc *= 0.5;
      dnu *= 0.5;
    }
  }
  // refinement can still walk onto the edge
  const double tc = 1e-3 * (box.c_max - box.c_min);
  const double tn = 1e-3 * (box.nu_max - box.nu_min);
  if (c < box.c_min + tc || c > box.c_max - tc || nu < box.nu_min + tn || nu > box.nu_max - tn) {
    throw CollapseUnstable("scaling_collapse: minimum on the search box boundary");
  }

  ScalingFit fit;
  fit.c_crit = c;
  fit.nu = nu;
  fit.collapse_residual = best;
  for (const auto& p : data) {
    const double n = static_cast<double>(p.n);
    fit.curves.push_back({p.n, (p.c - c) * std::pow(n, 1.0 / nu), p.mean_cost / n});
  }
  std::sort(fit.curves.begin(), fit.curves.end(), [](const CollapsedPoint& a, const CollapsedPoint& b) {
    return a.n != b.n ? a.n < b.n : a.x < b.x;
  });
  return fit;
}

// ---------------------------------------------------------------------------
// Ground states

GroundStateSet enumerate_ground_states(const ProblemAdapter& adapter, const TauPolicy& policy,
                                       const EnumerationBudget& budget) {
  if (budget.runs < 1) throw std::invalid_argument("enumerate_ground_states: budget must be >= 1 run");
  GroundStateSet gs;
  gs.runs = budget.runs;
  std::int64_t best2 = std::numeric_limits<std::int64_t>::max();
  std::size_t last_new_run = 0;
  bool overflow = false;
  std::size_t current_run = 0;

  RunOptions options;
  options.max_steps = budget.steps_per_run;
  options.restarts = 1;
  options.observer = [&](std::size_t, std::uint64_t, const Configuration& config) {
    if (config.cost2 > best2) return;
    if (config.cost2 < best2) {
      best2 = config.cost2;
      gs.states.clear();
      overflow = false;
    }
    if (gs.states.size() >= budget.max_states) {
      overflow = true;
      return;
    }
    if (gs.states.insert(adapter.canonical(config.states)).second) last_new_run = current_run;
  };
  for (current_run = 0; current_run < budget.runs; ++current_run) {
    run(adapter, policy.with_seed(derive_seed(policy.seed(), current_run)), options);
  }
  gs.optimal_cost = 0.5 * static_cast<double>(best2);
  const std::size_t quiet = (budget.runs + 3) / 4;
  gs.saturated = !overflow && last_new_run + quiet < budget.runs;
  return gs;
}

double backbone_fraction(const GroundStateSet& ground_states) {
  if (ground_states.states.empty()) throw EmptySet("backbone_fraction: no ground states");
  const auto& first = *ground_states.states.begin();
  const std::size_t n = first.size();
  if (n < 2) return 1.0;
  std::vector<char> fixed(n * n, 1);
  for (const auto& s : ground_states.states) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((s[i] == s[j]) != (first[i] == first[j])) fixed[i * n + j] = 0;
      }
    }
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) count += fixed[i * n + j];
  }
  return static_cast<double>(count) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

// ---------------------------------------------------------------------------
// Brute force

double brute_force_size(const ProblemAdapter& adapter) {
  const std::size_t n = adapter.size();
  switch (adapter.kind()) {
    case ProblemKind::bipartition: {
      // C(n-1, n/2-1)
      double count = 1.0;
      const std::size_t k = n / 2 - 1;
      for (std::size_t i = 1; i <= k; ++i) count = count * static_cast<double>(n - k + i - 1) / static_cast<double>(i);
      return std::round(count);
    }
    case ProblemKind::coloring: {
      // Restricted growth strings with at most K blocks: sum_j S(n, j).
      const int colors = adapter.state_count();
      std::vector<double> row(static_cast<std::size_t>(colors) + 1, 0.0);
      row[0] = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (int j = colors; j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0.0;
      }
      return std::accumulate(row.begin() + 1, row.end(), 0.0);
    }
    case ProblemKind::spin_glass: {
      const auto& sg = static_cast<const SpinGlassProblem&>(adapter).instance();
      return std::ldexp(1.0, static_cast<int>(sg.has_fields() ? n : n - 1));
    }
  }
  return 0.0;
}

BruteForceResult brute_force(const ProblemAdapter& adapter, std::uint64_t limit) {
  const double size = brute_force_size(adapter);
  if (size > static_cast<double>(limit)) {
    throw TooLarge("brute_force: " + std::to_string(size) + " candidates exceed the limit of " +
                   std::to_string(limit));
  }
  const std::size_t n = adapter.size();
  BruteForceResult result;
  std::int64_t best2 = std::numeric_limits<std::int64_t>::max();
  auto consider = [&](const std::vector<State>& states) {
    ++result.examined;
    const std::int64_t c2 = adapter.doubled_cost(states);
    if (c2 < best2) {
      best2 = c2;
      result.optima.clear();
    }
    if (c2 == best2) result.optima.push_back(states);
  };

  std::vector<State> states(n, 0);
  switch (adapter.kind()) {
    case ProblemKind::bipartition: {
      // Vertex 0 is on side 0; choose which n/2 of the rest join side 1.
      std::vector<State> rest(n - 1, 0);
      std::fill(rest.end() - static_cast<long>(n / 2), rest.end(), State{1});
      do {
        std::copy(rest.begin(), rest.end(), states.begin() + 1);
        consider(states);
      } while (std::next_permutation(rest.begin(), rest.end()));
      break;
    }
    case ProblemKind::coloring: {
      const int colors = adapter.state_count();
      // Iterative restricted-growth-string enumeration.
      std::vector<int> prefix_max(n, 0);
      std::size_t i = n == 0 ? 0 : 1;
      if (n == 0) {
        consider(states);
        break;
      }
      while (true) {
        if (i == n) {
          consider(states);
          // Backtrack to the last position that can still grow.
          std::size_t j = n - 1;
          while (j > 0 && (states[j] >= colors - 1 || states[j] > prefix_max[j - 1])) --j;
          if (j == 0) break;
          ++states[j];
          prefix_max[j] = std::max<int>(prefix_max[j - 1], states[j]);
          i = j + 1;
          continue;
        }
        states[i] = 0;
        prefix_max[i] = prefix_max[i - 1];
        ++i;
      }
      break;
    }
    case ProblemKind::spin_glass: {
      const auto& sg = static_cast<const SpinGlassProblem&>(adapter).instance();
      const std::size_t free_bits = sg.has_fields() ? n : n - 1;
      const std::uint64_t total = 1ULL << free_bits;
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t bit = sg.has_fields() ? b : b - 1;
          states[b] = (!sg.has_fields() && b == 0) ? State{1}
                                                   : ((mask >> bit) & 1U ? State{-1} : State{1});
        }
        consider(states);
      }
      break;
    }
  }
  result.optimal_cost = 0.5 * static_cast<double>(best2);
  for (auto& s : result.optima) s = adapter.canonical(s);
  std::sort(result.optima.begin(), result.optima.end());
  return result;
}

}  // namespace extremal
