#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "extremal/analysis.hpp"
#include "extremal/engine.hpp"
#include "extremal/errors.hpp"
#include "extremal/instances.hpp"
#include "extremal/ledger.hpp"
#include "extremal/rank.hpp"
#include "extremal/trace_io.hpp"
#include "support.hpp"

using namespace extremal;
using extremal::testing::make_graph;

TEST(TauPolicy, SingleRankAlwaysOne) {
  TauPolicy p(1.4, 1);
  for (double u : {0.0, 0.3, 0.999999}) EXPECT_EQ(p.sample_rank(u), 1u);
}

TEST(TauPolicy, TauZeroIsFlat) {
  TauPolicy p(0.0, 10);
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_NEAR(p.probability(k), 0.1, 1e-15);
  EXPECT_EQ(p.sample_rank(0.05), 1u);
  EXPECT_EQ(p.sample_rank(0.95), 10u);
}

TEST(TauPolicy, FirstRankMatchesDirectSum) {
  TauPolicy p(1.4, 4);
  const double z = 1.0 + std::pow(2.0, -1.4) + std::pow(3.0, -1.4) + std::pow(4.0, -1.4);
  EXPECT_NEAR(p.probability(1), 1.0 / z, 1e-15);
}

TEST(TauPolicy, TableInvariants) {
  for (double tau : {0.0, 0.5, 1.4, 3.0}) {
    TauPolicy p(tau, 1000);
    const auto cum = p.cumulative_weights();
    for (std::size_t i = 1; i < cum.size(); ++i) EXPECT_LT(cum[i - 1], cum[i]);
    EXPECT_NEAR(cum.back(), 1.0, 1e-12);
    for (std::size_t k : {2u, 17u, 1000u}) {
      EXPECT_NEAR(p.weight(k) / p.weight(1), std::pow(static_cast<double>(k), -tau), 1e-12);
    }
  }
}

TEST(TauPolicy, FractionalCumulative) {
  TauPolicy p(1.0, 5);
  EXPECT_DOUBLE_EQ(p.cumulative_at(0.0), 0.0);
  EXPECT_DOUBLE_EQ(p.cumulative_at(5.0), 1.0);
  EXPECT_NEAR(p.cumulative_at(1.5), p.probability(1) + 0.5 * p.probability(2), 1e-15);
}

TEST(TauPolicy, RejectsBadArguments) {
  EXPECT_THROW(TauPolicy(1.0, 0), std::invalid_argument);
  EXPECT_THROW(TauPolicy(-0.5, 4), std::invalid_argument);
  EXPECT_TRUE(TauPolicy::greedy(5).is_greedy());
  EXPECT_EQ(TauPolicy::greedy(5).sample_rank(0.99), 1u);
}

TEST(TauPolicy, RankFrequenciesWithinThreeSigma) {
  const std::size_t n = 20;
  const std::size_t draws = 1'000'000;
  for (double tau : {0.0, 0.5, 1.4, 3.0}) {
    TauPolicy p(tau, n);
    Rng rng(derive_seed(42, static_cast<std::uint64_t>(tau * 10)));
    std::vector<std::size_t> count(n + 1, 0);
    for (std::size_t i = 0; i < draws; ++i) ++count[p.sample_rank(uniform01(rng))];
    for (std::size_t k = 1; k <= n; ++k) {
      // Direct oracle, not the policy's own table.
      double z = 0.0;
      for (std::size_t j = 1; j <= n; ++j) z += std::pow(static_cast<double>(j), -tau);
      const double q = std::pow(static_cast<double>(k), -tau) / z;
      const double sigma = std::sqrt(draws * q * (1.0 - q));
      EXPECT_LE(std::fabs(static_cast<double>(count[k]) - draws * q), 3.0 * sigma + 1.0) << "tau " << tau << " k " << k;
    }
  }
}

TEST(FitnessLedger, DistinctFitnessRankOneIsMinimum) {
  const std::vector<int> keys{0, -3, 2, -1};
  FitnessLedger ledger(-4, 4, keys);
  Rng rng(1);
  EXPECT_EQ(ledger.select_by_rank(1, rng), 1u);
  EXPECT_EQ(ledger.select_by_rank(2, rng), 3u);
  EXPECT_EQ(ledger.select_by_rank(4, rng), 2u);
}

TEST(FitnessLedger, TieBrokenUniformly) {
  // {-2: [a], -1: [b, c], 0: [d]} in doubled units.
  const std::vector<int> keys{-4, -2, -2, 0};
  FitnessLedger ledger(-4, 0, keys);
  Rng rng(7);
  std::map<std::size_t, int> seen;
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) ++seen[ledger.select_by_rank(2, rng)];
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_NEAR(seen[1] / double(draws), 0.5, 3 * std::sqrt(0.25 / draws));
  EXPECT_EQ(ledger.select_by_rank(1, rng), 0u);
  EXPECT_EQ(ledger.select_by_rank(4, rng), 3u);
}

TEST(FitnessLedger, AllEqualIsUniform) {
  const std::vector<int> keys(5, 0);
  FitnessLedger ledger(-2, 2, keys);
  Rng rng(3);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 50'000; ++i) ++seen[ledger.select_by_rank(3, rng)];
  for (int c : seen) EXPECT_NEAR(c / 50'000.0, 0.2, 0.01);
}

TEST(FitnessLedger, RefileKeepsConsistency) {
  std::vector<int> keys{0, 1, 2, 3, -1, -2};
  FitnessLedger ledger(-3, 3, keys);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto v = uniform_below(rng, keys.size());
    keys[v] = static_cast<int>(uniform_below(rng, 7)) - 3;
    ledger.refile(v, keys[v]);
  }
  EXPECT_TRUE(ledger.consistent_with(keys));
  EXPECT_EQ(ledger.worst_key(), *std::min_element(keys.begin(), keys.end()));
}

namespace {

std::shared_ptr<const SpinGlass> random_glass(std::size_t L, std::uint64_t seed) {
  return std::make_shared<const SpinGlass>(generate_pm_j_cubic(L, seed));
}

void check_scratch(const ProblemAdapter& a, const Configuration& c, const FitnessLedger& l) {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(c.fitness2[i], a.doubled_fitness(i, c.states)) << "variable " << i;
    sum += c.fitness2[i];
  }
  ASSERT_EQ(c.cost2, -sum);
  ASSERT_EQ(c.cost2, a.doubled_cost(c.states));
  ASSERT_TRUE(l.consistent_with(c.fitness2));
}

void run_scratch_oracle(const ProblemAdapter& a, std::uint64_t seed) {
  Rng rng(seed);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  TauPolicy p(1.4, a.size());
  for (int step = 0; step < 10'000; ++step) {
    eo_step(c, l, a, p, rng);
    if (step % 97 == 0) check_scratch(a, c, l);
  }
  check_scratch(a, c, l);
}

}  // namespace

TEST(Engine, IncrementalEqualsScratchBipartition) {
  BipartitionProblem a(std::make_shared<const Graph>(generate_erdos_renyi(60, 3.0, 11)));
  run_scratch_oracle(a, 1);
}

TEST(Engine, IncrementalEqualsScratchColoring) {
  ColoringProblem a(std::make_shared<const Graph>(generate_erdos_renyi(60, 4.5, 12)), 3);
  run_scratch_oracle(a, 2);
}

TEST(Engine, IncrementalEqualsScratchSpinGlass) {
  SpinGlassProblem a(random_glass(4, 13));
  run_scratch_oracle(a, 3);
}

TEST(Engine, SpinFlipRefilesOnlyNeighborhood) {
  SpinGlassProblem a(random_glass(3, 5));
  Rng rng(9);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  const auto before = c.states;
  const auto fit_before = c.fitness2;
  eo_step(c, l, a, TauPolicy(1.2, a.size()), rng);
  std::size_t flipped = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] != c.states[i]) {
      ++flipped;
      j = i;
    }
  }
  ASSERT_EQ(flipped, 1u);
  std::set<std::size_t> touched{j};
  for (const auto& cp : a.instance().couplings(j)) touched.insert(cp.other);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (!touched.count(i)) EXPECT_EQ(c.fitness2[i], fit_before[i]);
  }
}

TEST(Engine, BipartitionStaysBalanced) {
  BipartitionProblem a(std::make_shared<const Graph>(generate_erdos_renyi(40, 2.0, 3)));
  Rng rng(4);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  for (int i = 0; i < 2000; ++i) {
    eo_step(c, l, a, TauPolicy(1.4, a.size()), rng);
    ASSERT_TRUE(a.feasible(c.states));
  }
}

TEST(Engine, CostIncreasesHappen) {
  BipartitionProblem a(std::make_shared<const Graph>(generate_erdos_renyi(200, 3.0, 21)));
  Rng rng(8);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  int increases = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto before = c.cost2;
    eo_step(c, l, a, TauPolicy(1.4, a.size()), rng);
    increases += c.cost2 > before;
  }
  EXPECT_GT(increases, 0);
}

TEST(Engine, RunIsDeterministic) {
  SpinGlassProblem a(random_glass(3, 17));
  RunOptions o;
  o.max_steps = 20'000;
  o.restarts = 3;
  const auto t1 = run(a, TauPolicy(1.15, a.size(), 99), o);
  const auto t2 = run(a, TauPolicy(1.15, a.size(), 99), o);
  EXPECT_TRUE(t1 == t2);
  std::ostringstream s1;
  std::ostringstream s2;
  write_trace_csv(s1, t1, "x");
  write_trace_csv(s2, t2, "x");
  EXPECT_EQ(s1.str(), s2.str());
  const auto t3 = run(a, TauPolicy(1.15, a.size(), 100), o);
  EXPECT_FALSE(t1 == t3);
}

TEST(Engine, TraceInvariants) {
  ColoringProblem a(std::make_shared<const Graph>(generate_erdos_renyi(100, 5.0, 2)), 3);
  RunOptions o;
  o.max_steps = 50'000;
  const auto t = run(a, TauPolicy(1.4, a.size(), 5), o);
  ASSERT_FALSE(t.samples.empty());
  EXPECT_EQ(t.samples.front().step, 0u);
  EXPECT_EQ(t.samples.back().step, o.max_steps);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    EXPECT_LE(t.samples[i].best_cost, t.samples[i].cost);
    if (i) {
      EXPECT_LE(t.samples[i].best_cost, t.samples[i - 1].best_cost);
      EXPECT_LT(t.samples[i - 1].step, t.samples[i].step);
    }
  }
  EXPECT_EQ(a.cost(t.best_states), t.best_cost);
  EXPECT_EQ(t.samples.back().best_cost, t.best_cost);
  // Dense up to 1e4 steps, thinned after.
  EXPECT_LT(t.samples.size(), 12'000u);
}

TEST(Engine, EmptyGraphHasZeroCutAtStart) {
  BipartitionProblem a(std::make_shared<const Graph>(Graph(10, {})));
  RunOptions o;
  o.max_steps = 100;
  const auto t = run(a, TauPolicy(1.4, 10, 1), o);
  EXPECT_EQ(t.best_cost, 0.0);
  EXPECT_EQ(t.steps_to_best, 0u);
}

TEST(Engine, GreedyAlwaysUpdatesRankOne) {
  ColoringProblem a(std::make_shared<const Graph>(generate_erdos_renyi(30, 4.0, 7)), 3);
  Rng rng(1);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  const TauPolicy greedy = TauPolicy::greedy(a.size());
  for (int i = 0; i < 500; ++i) {
    const int worst = *std::min_element(c.fitness2.begin(), c.fitness2.end());
    const auto before = c.states;
    eo_step(c, l, a, greedy, rng);
    std::size_t changed = 0;
    for (std::size_t v = 0; v < before.size(); ++v) {
      if (before[v] != c.states[v]) {
        ++changed;
        // The recolored vertex was one of the worst before the move.
        EXPECT_EQ(a.doubled_fitness(v, before), worst);
      }
    }
    EXPECT_EQ(changed, 1u);
  }
}

TEST(Engine, GreedyColoringCyclesOnDeadEnd) {
  // 3-colorable, yet greedy EO from this start shuttles among a few
  // canonical colorings that all leave monochromatic edges.
  auto g = make_graph(8, {{0, 1}, {0, 6}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6},
                          {1, 7}, {2, 4}, {2, 7}, {3, 4}, {3, 7}, {4, 6}, {5, 7}});
  ColoringProblem a(g, 3);
  ASSERT_EQ(brute_force(a).optimal_cost, 0.0);
  Rng rng(63);
  Configuration c = a.configure({0, 2, 2, 2, 0, 0, 1, 2});
  FitnessLedger l = a.make_ledger(c);
  const TauPolicy greedy = TauPolicy::greedy(8);
  std::set<std::vector<State>> visited;
  double best = c.cost();
  for (int i = 0; i < 20'000; ++i) {
    eo_step(c, l, a, greedy, rng);
    best = std::min(best, c.cost());
    if (i >= 1000) visited.insert(a.canonical(c.states));
  }
  EXPECT_GT(best, 0.0);
  EXPECT_LE(visited.size(), 8u);

  // tau-EO on the same instance escapes.
  RunOptions o;
  o.max_steps = 20'000;
  EXPECT_EQ(run(a, TauPolicy(1.4, 8, 63), o).best_cost, 0.0);
}

TEST(Engine, RejectsBadOptions) {
  SpinGlassProblem a(random_glass(2, 1));
  RunOptions o;
  o.max_steps = 0;
  EXPECT_THROW(run(a, TauPolicy(1.0, a.size()), o), std::invalid_argument);
  o.max_steps = 10;
  o.restarts = 0;
  EXPECT_THROW(run(a, TauPolicy(1.0, a.size()), o), std::invalid_argument);
  o.restarts = 1;
  EXPECT_THROW(run(a, TauPolicy(1.0, a.size() + 1), o), std::invalid_argument);
}

TEST(TraceIo, RoundTrip) {
  SpinGlassProblem a(random_glass(3, 2));
  RunOptions o;
  o.max_steps = 30'000;
  const auto t = run(a, TauPolicy(1.15, a.size(), 3), o);
  std::stringstream s;
  write_trace_csv(s, t, "abc");
  EXPECT_EQ(s.str().rfind("# manifest abc\nstep,cost,best_cost\n", 0), 0u);
  const auto samples = read_trace_csv(s);
  EXPECT_EQ(samples, t.samples);
}

TEST(TraceIo, BadRowReportsLine) {
  std::stringstream s("step,cost,best_cost\n1,2,2\n2,x,2\n");
  try {
    read_trace_csv(s);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
