#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "extremal/errors.hpp"
#include "extremal/models.hpp"

using namespace extremal;

TEST(BakSneppen, RingOfThreeRedrawsEverything) {
  BsChain chain(3, 1);
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> before(chain.fitness().begin(), chain.fitness().end());
    const double replaced = chain.step();
    EXPECT_EQ(replaced, *std::min_element(before.begin(), before.end()));
    for (int i = 0; i < 3; ++i) EXPECT_NE(chain.fitness()[i], before[i]);
  }
  EXPECT_EQ(chain.steps(), 100u);
  EXPECT_THROW(BsChain(2, 1), std::invalid_argument);
}

TEST(BakSneppen, MinimumTrackingMatchesScan) {
  BsChain chain(37, 4);
  for (int s = 0; s < 5000; ++s) {
    const auto f = chain.fitness();
    const auto it = std::min_element(f.begin(), f.end());
    const double smallest = *it;
    ASSERT_EQ(chain.minimum_index(), static_cast<std::size_t>(it - f.begin()));
    ASSERT_EQ(chain.step(), smallest);
    for (double v : chain.fitness()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
  }
}

TEST(BakSneppen, OnlyMinimumAndNeighborsChange) {
  BsChain chain(10, 8);
  for (int s = 0; s < 200; ++s) {
    const std::vector<double> before(chain.fitness().begin(), chain.fitness().end());
    const std::size_t m = chain.minimum_index();
    chain.step();
    for (std::size_t i = 0; i < 10; ++i) {
      const bool touched = i == m || i == (m + 1) % 10 || i == (m + 9) % 10;
      if (!touched) EXPECT_EQ(chain.fitness()[i], before[i]);
    }
  }
}

TEST(BakSneppen, DevelopsThreshold) {
  BsChain chain(1000, 2);
  for (int s = 0; s < 10'000'000; ++s) chain.step();
  const auto counts = histogram01(chain.fitness(), 50);
  const double threshold = histogram_threshold(counts);
  EXPECT_GE(threshold, 0.6);
  EXPECT_LE(threshold, 0.7);
}

TEST(BakSneppen, MinimumRecordIsStationary) {
  BsChain chain(200, 3);
  for (int s = 0; s < 2'000'000; ++s) chain.step();
  std::vector<double> first;
  std::vector<double> second;
  const int thin = 400;
  const int samples = 4000;
  for (int k = 0; k < 2 * samples; ++k) {
    double last = 0.0;
    for (int s = 0; s < thin; ++s) last = chain.step();
    (k < samples ? first : second).push_back(last);
  }
  EXPECT_TRUE(ks_same_distribution(first, second, 0.01)) << ks_statistic(first, second);
}

TEST(Histogram, ThresholdOfStep) {
  std::vector<std::uint64_t> counts(100, 0);
  for (std::size_t i = 67; i < 100; ++i) counts[i] = 1000;
  EXPECT_NEAR(histogram_threshold(counts), 0.67, 0.011);
  const std::vector<double> v{0.0, 0.25, 0.5, 1.0};
  const auto h = histogram01(v, 4);
  EXPECT_EQ(h, (std::vector<std::uint64_t>{1, 1, 1, 1}));
}

TEST(Ks, DetectsShiftAndAcceptsSameSource) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& x : a) x = u(gen);
  for (auto& x : b) x = u(gen);
  for (auto& x : c) x = 0.1 + u(gen);
  EXPECT_TRUE(ks_same_distribution(a, b));
  EXPECT_FALSE(ks_same_distribution(a, c));
  EXPECT_NEAR(ks_statistic({0, 1}, {2, 3}), 1.0, 1e-12);
}

namespace {

JamState jam(double r0, double r1, double r2, std::size_t n, double tau) {
  JamState s;
  s.rho = {r0, r1, r2};
  s.n = n;
  s.tau = tau;
  return s;
}

}  // namespace

TEST(JamSelection, SingleInterval) {
  const auto q = jam_selection_probabilities(jam(0, 0, 1, 50, 1.4));
  EXPECT_NEAR(q[2], 1.0, 1e-12);
  EXPECT_NEAR(q[0] + q[1], 0.0, 1e-12);
}

TEST(JamSelection, FlatRanksGiveFractions) {
  const auto q = jam_selection_probabilities(jam(0.5, 0.3, 0.2, 100, 0.0));
  EXPECT_NEAR(q[0], 0.5, 1e-12);
  EXPECT_NEAR(q[1], 0.3, 1e-12);
  EXPECT_NEAR(q[2], 0.2, 1e-12);
}

TEST(JamSelection, PartialSumOracle) {
  double z = 0, s2 = 0, s1 = 0;
  for (int k = 1; k <= 100; ++k) {
    const double w = std::pow(k, -1.4);
    z += w;
    if (k <= 20) s2 += w;
    else if (k <= 50) s1 += w;
  }
  const auto q = jam_selection_probabilities(jam(0.5, 0.3, 0.2, 100, 1.4));
  EXPECT_NEAR(q[2], s2 / z, 1e-12);
  EXPECT_NEAR(q[1], s1 / z, 1e-12);
  EXPECT_NEAR(q[0], 1.0 - (s1 + s2) / z, 1e-12);
}

TEST(JamSelection, SumsToOne) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t n : {10, 100, 1000, 10000}) {
    for (int rep = 0; rep < 50; ++rep) {
      const double a = u(gen);
      const double b = u(gen) * (1 - a);
      const auto q = jam_selection_probabilities(jam(a, b, 1 - a - b, n, 4 * u(gen)));
      EXPECT_NEAR(q[0] + q[1] + q[2], 1.0, 1e-12);
      for (double x : q) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(JamEvolve, AbsorbingKernelEmpties) {
  const JamResult r = jam_evolve(jam(0.2, 0.3, 0.5, 100, 1.0), FlowModel::absorbing(), {20'000});
  EXPECT_NEAR(r.final_state.rho[0], 1.0, 1e-9);
  EXPECT_NEAR(r.final_cost, 0.0, 1e-9);
}

TEST(JamEvolve, IdentityKernelIsStatic) {
  JamOptions options;
  options.updates = 500;
  options.record_every = 50;
  const JamResult r = jam_evolve(jam(0.2, 0.3, 0.5, 100, 1.0), FlowModel::identity(), options);
  for (const auto& s : r.trajectory) {
    EXPECT_NEAR(s.rho[0], 0.2, 1e-12);
    EXPECT_NEAR(s.rho[1], 0.3, 1e-12);
    EXPECT_NEAR(s.rho[2], 0.5, 1e-12);
  }
  EXPECT_NEAR(r.mean_cost, 0.3 + 1.0, 1e-12);
}

TEST(JamEvolve, MeanFieldConservesMass) {
  for (auto model : {FlowModel::barrier(), FlowModel::constant_barrier()}) {
    JamOptions options;
    options.record_every = 1;
    const JamResult r = jam_evolve(jam(0, 0, 1, 100, 1.5), model, options);
    EXPECT_EQ(r.trajectory.size(), 2001u);
    for (const auto& s : r.trajectory) {
      EXPECT_NEAR(s.rho[0] + s.rho[1] + s.rho[2], 1.0, 1e-12);
      for (double x : s.rho) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(JamEvolve, StochasticModeMovesWholeVariables) {
  JamOptions options;
  options.stochastic = true;
  options.seed = 3;
  options.record_every = 1;
  const JamResult r = jam_evolve(jam(0, 0, 1, 50, 1.5), FlowModel::barrier(), options);
  for (const auto& s : r.trajectory) {
    for (double x : s.rho) EXPECT_NEAR(x * 50, std::round(x * 50), 1e-9);
  }
  const JamResult again = jam_evolve(jam(0, 0, 1, 50, 1.5), FlowModel::barrier(), options);
  EXPECT_EQ(r.final_cost, again.final_cost);
}

TEST(JamEvolve, BadKernelThrows) {
  const JamKernel leaky{JamRow{1.0, 0.0, 0.0}, JamRow{0.5, 0.4, 0.0}, JamRow{0.0, 0.0, 1.0}};
  EXPECT_THROW(jam_evolve(jam(0.2, 0.3, 0.5, 100, 1.0), FlowModel(leaky), {10}), MassNotConserved);
}

TEST(JamEvolve, BarrierSweepHasInteriorMinimum) {
  std::vector<double> taus;
  for (int k = 0; k <= 30; ++k) taus.push_back(1.0 + 0.1 * k);
  const auto sweep = jam_tau_sweep(1000, taus, FlowModel::barrier());
  const double best = sweep_argmin(sweep);
  EXPECT_GT(best, taus.front());
  EXPECT_LT(best, taus.back());
}

TEST(TauOpt, LeadingOrderPrediction) {
  EXPECT_NEAR(predict_tau_opt(10, 4), 1 + 4 / std::log(10.0), 1e-12);
  EXPECT_NEAR(predict_tau_opt(10, 4), 2.74, 0.01);
  EXPECT_NEAR(predict_tau_opt(10000, 4), 1.43, 0.01);
  EXPECT_NEAR(predict_tau_opt(1e300, 4), 1.0, 0.01);
}

TEST(TauOpt, FitRecoversAmplitude) {
  const std::vector<double> sizes{10, 100, 1000, 10000};
  std::vector<double> taus;
  for (double n : sizes) taus.push_back(predict_tau_opt(n, 3.0));
  const TauOptFit fit = fit_tau_opt(sizes, taus);
  EXPECT_NEAR(fit.amplitude, 3.0, 1e-12);
  EXPECT_NEAR(fit.relative_residual, 0.0, 1e-12);
}
