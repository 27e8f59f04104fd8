#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "extremal/engine.hpp"
#include "extremal/instances.hpp"
#include "support.hpp"

using namespace extremal;
using namespace extremal::testing;

TEST(Bipartition, FitnessIsHalfCutDegree) {
  // Star centered at 0 with three leaves on the other side plus an isolated vertex pair.
  BipartitionProblem a(make_graph(6, {{0, 1}, {0, 2}, {0, 3}}));
  const std::vector<State> s{0, 1, 1, 1, 0, 0};
  EXPECT_EQ(a.doubled_fitness(0, s), -3);  // lambda = -1.5
  EXPECT_EQ(a.doubled_fitness(4, s), 0);   // isolated
  EXPECT_EQ(a.cost(s), 3.0);
}

TEST(Bipartition, FourCycleOptimumIsTwo) {
  auto g = cycle_graph(4);
  BipartitionProblem a(g);
  EXPECT_EQ(a.cost(std::vector<State>{0, 0, 1, 1}), 2.0);
  EXPECT_EQ(a.cost(std::vector<State>{0, 1, 0, 1}), 4.0);
  const Configuration c = a.configure({0, 0, 1, 1});
  EXPECT_EQ(c.cost2, 4);
  int sum = 0;
  for (int f : c.fitness2) sum += f;
  EXPECT_EQ(sum, -4);
}

TEST(Bipartition, RequiresEvenSize) {
  EXPECT_THROW(BipartitionProblem(make_graph(3, {{0, 1}})), std::invalid_argument);
}

TEST(Bipartition, MovePreservesBalanceAndMatchesOracle) {
  auto g = std::make_shared<const Graph>(generate_erdos_renyi(50, 3.0, 4));
  for (auto partner : {BipartitionProblem::Partner::ranked, BipartitionProblem::Partner::uniform}) {
    BipartitionProblem a(g, partner);
    Rng rng(2);
    Configuration c = a.configure(a.random_states(rng));
    FitnessLedger l = a.make_ledger(c);
    TauPolicy p(1.4, 50);
    for (int i = 0; i < 1000; ++i) {
      a.apply_move(c, l, p, rng);
      ASSERT_TRUE(a.feasible(c.states));
      ASSERT_EQ(c.cost(), cut_size(*g, c.states));
    }
  }
}

TEST(Bipartition, UniformPartnerIsUniformOverOppositeSide) {
  // Vertex 0 is uniquely worst; greedy picks it, the partner is random.
  auto g = make_graph(8, {{0, 4}, {0, 5}, {0, 6}, {1, 2}});
  BipartitionProblem a(g, BipartitionProblem::Partner::uniform);
  const std::vector<State> start{0, 0, 0, 0, 1, 1, 1, 1};
  const TauPolicy greedy = TauPolicy::greedy(8);
  Rng rng(11);
  std::map<std::size_t, int> partner;
  const int trials = 40'000;
  for (int t = 0; t < trials; ++t) {
    Configuration c = a.configure(start);
    FitnessLedger l = a.make_ledger(c);
    a.apply_move(c, l, greedy, rng);
    ASSERT_EQ(c.states[0], 1);
    for (std::size_t v = 4; v < 8; ++v) {
      if (c.states[v] == 0) ++partner[v];
    }
  }
  ASSERT_EQ(partner.size(), 4u);
  for (auto [v, count] : partner) EXPECT_NEAR(count / double(trials), 0.25, 3 * std::sqrt(0.1875 / trials));
}

TEST(Bipartition, TwoVerticesSwapIsAllowed) {
  BipartitionProblem a(make_graph(2, {{0, 1}}));
  Rng rng(1);
  Configuration c = a.configure({0, 1});
  FitnessLedger l = a.make_ledger(c);
  a.apply_move(c, l, TauPolicy(1.4, 2), rng);
  EXPECT_EQ(c.states, (std::vector<State>{1, 0}));
  EXPECT_EQ(c.cost(), 1.0);
}

TEST(Bipartition, CanonicalFixesFirstVertex) {
  BipartitionProblem a(cycle_graph(4));
  EXPECT_EQ(a.canonical(std::vector<State>{1, 1, 0, 0}), (std::vector<State>{0, 0, 1, 1}));
  EXPECT_EQ(a.canonical(std::vector<State>{0, 1, 0, 1}), (std::vector<State>{0, 1, 0, 1}));
}

TEST(Coloring, ProperColoringHasZeroCost) {
  ColoringProblem a(complete_graph(3), 3);
  const std::vector<State> s{0, 1, 2};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.doubled_fitness(i, s), 0);
  EXPECT_EQ(a.cost(s), 0.0);
}

TEST(Coloring, CostCountsMonochromaticEdges) {
  auto g = std::make_shared<const Graph>(generate_erdos_renyi(40, 5.0, 8));
  ColoringProblem a(g, 3);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto s = a.random_states(rng);
    const Configuration c = a.configure(s);
    std::int64_t sum = 0;
    for (int f : c.fitness2) sum += f;
    ASSERT_EQ(c.cost2, -sum);
    ASSERT_EQ(c.cost(), monochromatic(*g, s));
  }
}

TEST(Coloring, TwoColorsFlipDeterministically) {
  ColoringProblem a(cycle_graph(6), 2);
  Rng rng(4);
  Configuration c = a.configure({0, 0, 1, 1, 0, 1});
  FitnessLedger l = a.make_ledger(c);
  for (int i = 0; i < 200; ++i) {
    const auto before = c.states;
    a.apply_move(c, l, TauPolicy(1.0, 6), rng);
    int changed = 0;
    for (std::size_t v = 0; v < 6; ++v) {
      if (before[v] != c.states[v]) {
        ++changed;
        EXPECT_EQ(c.states[v], 1 - before[v]);
      }
    }
    EXPECT_EQ(changed, 1);
  }
}

TEST(Coloring, NewColorIsUniformOverOthers) {
  ColoringProblem a(make_graph(2, {}), 4);
  Rng rng(6);
  std::map<int, int> seen;
  for (int i = 0; i < 30'000; ++i) {
    Configuration c = a.configure({0, 0});
    FitnessLedger l = a.make_ledger(c);
    a.apply_move(c, l, TauPolicy(0.0, 2), rng);
    // Isolated vertices: recoloring never changes the cost.
    ASSERT_EQ(c.cost2, 0);
    for (State s : c.states) {
      if (s != 0) ++seen[s];
    }
  }
  ASSERT_EQ(seen.size(), 3u);
  for (auto [color, count] : seen) EXPECT_NEAR(count / 30'000.0, 1.0 / 3.0, 0.015);
}

TEST(Coloring, CanonicalRelabelsByFirstAppearance) {
  ColoringProblem a(make_graph(4, {}), 3);
  EXPECT_EQ(a.canonical(std::vector<State>{2, 2, 0, 1}), (std::vector<State>{0, 0, 1, 2}));
  EXPECT_EQ(a.canonical(std::vector<State>{1, 0, 1, 2}), (std::vector<State>{0, 1, 0, 2}));
}

TEST(SpinGlass, FerromagnetGroundState) {
  std::vector<Bond> bonds;
  const SpinGlass lattice = generate_pm_j_cubic(3, 1);
  for (const Bond& b : lattice.bonds()) bonds.push_back({b.i, b.j, 1});
  SpinGlassProblem a(std::make_shared<const SpinGlass>(27, bonds));
  const std::vector<State> up(27, 1);
  for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(a.doubled_fitness(i, up), 6);  // lambda = 3
  EXPECT_EQ(a.cost(up), -81.0);
}

TEST(SpinGlass, SingleBondFitness) {
  const std::vector<Bond> bonds{{0, 1, 1}};
  SpinGlassProblem a(std::make_shared<const SpinGlass>(2, bonds));
  const std::vector<State> s{1, 1};
  EXPECT_EQ(a.doubled_fitness(0, s), 1);
  EXPECT_EQ(a.doubled_fitness(1, s), 1);
}

TEST(SpinGlass, MatchesHamiltonianOnRandomInstances) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Bond> bonds;
    for (Vertex i = 0; i < 8; ++i) {
      for (Vertex j = i + 1; j < 8; ++j) {
        if (uniform01(rng) < 0.5) bonds.push_back({i, j, coin_flip(rng) ? 1 : -1});
      }
    }
    std::vector<int> h2(8);
    for (int& h : h2) h = static_cast<int>(uniform_below(rng, 5)) - 2;
    auto sg = std::make_shared<const SpinGlass>(8, bonds, h2);
    SpinGlassProblem a(sg);
    for (int k = 0; k < 20; ++k) {
      const auto s = a.random_states(rng);
      const Configuration c = a.configure(s);
      std::int64_t sum = 0;
      for (int f : c.fitness2) sum += f;
      ASSERT_EQ(c.cost2, -sum);
      ASSERT_DOUBLE_EQ(c.cost(), hamiltonian(*sg, s));
    }
  }
}

TEST(SpinGlass, FlipIsAnInvolutionAndNegatesFitness) {
  auto sg = std::make_shared<const SpinGlass>(generate_pm_j_cubic(3, 4));
  SpinGlassProblem a(sg);
  Rng rng(3);
  const auto start = a.random_states(rng);
  Configuration c = a.configure(start);
  FitnessLedger l = a.make_ledger(c);
  const TauPolicy greedy = TauPolicy::greedy(a.size());
  const auto f0 = c.fitness2;
  a.apply_move(c, l, greedy, rng);
  std::size_t j = 0;
  while (c.states[j] == start[j]) ++j;
  EXPECT_EQ(c.fitness2[j], -f0[j]);
  // Flipping j back restores everything.
  auto back = c.states;
  back[j] = static_cast<State>(-back[j]);
  EXPECT_EQ(back, start);
  EXPECT_EQ(a.configure(back).fitness2, f0);
}

TEST(SpinGlass, GlobalFlipSymmetry) {
  auto sg = std::make_shared<const SpinGlass>(generate_pm_j_cubic(4, 9));
  SpinGlassProblem a(sg);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto s = a.random_states(rng);
    const auto c1 = a.doubled_cost(s);
    for (State& x : s) x = static_cast<State>(-x);
    EXPECT_EQ(a.doubled_cost(s), c1);
  }
  std::vector<State> s{-1, 1, 1, -1, 1, 1, 1, 1};
  s.resize(a.size(), 1);
  EXPECT_EQ(a.canonical(s)[0], 1);
}

TEST(SpinGlass, LedgerMatchesRebuild) {
  SpinGlassProblem a(std::make_shared<const SpinGlass>(generate_pm_j_cubic(3, 6)));
  Rng rng(12);
  Configuration c = a.configure(a.random_states(rng));
  FitnessLedger l = a.make_ledger(c);
  for (int i = 0; i < 5000; ++i) a.apply_move(c, l, TauPolicy(1.15, a.size()), rng);
  const FitnessLedger rebuilt = a.make_ledger(c);
  EXPECT_TRUE(l.consistent_with(c.fitness2));
  EXPECT_TRUE(rebuilt.consistent_with(c.fitness2));
  for (int key = l.min_key(); key <= l.max_key(); ++key) EXPECT_EQ(l.bucket_size(key), rebuilt.bucket_size(key));
}

TEST(Linkage, CostIsMinusFitnessSumForAllAdapters) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 * (2 + uniform_below(rng, 31));
    auto g = std::make_shared<const Graph>(generate_erdos_renyi(n, 3.0, rng()));
    BipartitionProblem gbp(g);
    ColoringProblem col(g, 3);
    SpinGlassProblem sg(std::make_shared<const SpinGlass>(assign_pm_j(*g, rng())));
    for (const ProblemAdapter* a : std::initializer_list<const ProblemAdapter*>{&gbp, &col, &sg}) {
      for (int k = 0; k < 50; ++k) {
        const Configuration c = a->configure(a->random_states(rng));
        std::int64_t sum = 0;
        for (int f : c.fitness2) sum += f;
        ASSERT_EQ(c.cost2, -sum);
      }
    }
  }
}
