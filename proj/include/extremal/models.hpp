#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "extremal/rank.hpp"
#include "extremal/rng.hpp"

namespace extremal {

// ---------------------------------------------------------------------------
// Bak-Sneppen ring

class BsChain {
 public:
  BsChain(std::size_t n, std::uint64_t seed);

  // Replaces the global minimum and its two ring neighbors with fresh
  // uniform values. Returns the minimum that was replaced.
  double step();

  std::span<const double> fitness() const { return fitness_; }
  std::size_t size() const { return fitness_.size(); }
  std::uint64_t steps() const { return steps_; }
  std::size_t minimum_index() const { return tree_[1]; }
  double minimum() const { return fitness_[tree_[1]]; }

 private:
  void update(std::size_t i);

  std::vector<double> fitness_;
  std::vector<std::size_t> tree_;  // index of the smallest leaf per node
  std::size_t leaves_ = 0;
  std::uint64_t steps_ = 0;
  Rng rng_;
};

// Counts of values in [0, 1] over `bins` equal bins.
std::vector<std::uint64_t> histogram01(std::span<const double> values, std::size_t bins);

// Where the histogram first reaches half of the plateau height measured
// over the top fifth of [0, 1]; the knee of a step-like distribution.
double histogram_threshold(std::span<const std::uint64_t> counts);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// True when the KS test does not reject equality of distributions at `alpha`.
bool ks_same_distribution(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

// ---------------------------------------------------------------------------
// Three-state jamming model

// Fractions of variables in fitness states 0, -1 and -2 (rho[alpha] holds
// state -alpha).
struct JamState {
  std::array<double, 3> rho{0.0, 0.0, 1.0};
  std::size_t n = 1;
  double tau = 0.0;

  double cost() const { return rho[1] + 2.0 * rho[2]; }
};

using JamRow = std::array<double, 3>;
using JamKernel = std::array<JamRow, 3>;  // [selected state][destination]

class FlowModel {
 public:
  using Function = std::function<JamKernel(const std::array<double, 3>& rho)>;

  explicit FlowModel(Function kernel) : kernel_(std::move(kernel)) {}
  explicit FlowModel(const JamKernel& fixed);

  JamKernel kernel(const std::array<double, 3>& rho) const { return kernel_(rho); }

  // Default: a selected 0 is knocked to -1, a -1 relaxes to 0, and a -2
  // relaxes to 0 only with probability 0.01 + 4 rho1; otherwise it stays
  // jammed.
  static FlowModel barrier();
  // Constant rows: -2 -> -1 (0.9) / 0 (0.1); -1 -> -2 (0.97) / 0 (0.03); 0 -> -1.
  static FlowModel constant_barrier();
  static FlowModel identity();
  static FlowModel absorbing();

 private:
  Function kernel_;
};

// Selection probabilities {Q0, Q1, Q2} of each state when ranks are filled
// worst-first (-2, then -1, then 0) and rank k is chosen with P ~ k^-tau.
std::array<double, 3> jam_selection_probabilities(const JamState& state);
std::array<double, 3> jam_selection_probabilities(const std::array<double, 3>& rho, const TauPolicy& policy);

struct JamSample {
  std::uint64_t step = 0;
  std::array<double, 3> rho{};
  double cost = 0.0;
};

struct JamOptions {
  std::uint64_t updates = 0;  // 0 means 20 n
  bool stochastic = false;
  std::uint64_t seed = 0;
  std::uint64_t record_every = 0;  // 0 records only the endpoints
};

struct JamResult {
  std::vector<JamSample> trajectory;
  JamState final_state;
  double final_cost = 0.0;
  double mean_cost = 0.0;  // time average over the updates
};

// Each update moves 1/n of mass out of a selected state along the kernel
// row; mean-field mode applies the expected flow. Throws MassNotConserved
// when the total drifts from 1 by more than 1e-9 or a row does not sum to 1.
JamResult jam_evolve(const JamState& state, const FlowModel& model, const JamOptions& options = {});

double predict_tau_opt(double n, double amplitude);

struct JamSweepPoint {
  double tau = 0.0;
  std::size_t n = 0;
  double mean_cost = 0.0;  // cost at the end of the run
};

std::vector<JamSweepPoint> jam_tau_sweep(std::size_t n, std::span<const double> taus, const FlowModel& model,
                                         const JamOptions& options = {},
                                         std::array<double, 3> initial = {0.0, 0.0, 1.0});

// tau with the smallest cost; ties go to the smaller tau.
double sweep_argmin(std::span<const JamSweepPoint> sweep);

struct TauOptFit {
  double amplitude = 0.0;
  double relative_residual = 0.0;  // RMS of (tau - fit) / fit
};

// Least-squares fit of tau_opt - 1 = A / ln n.
TauOptFit fit_tau_opt(std::span<const double> sizes, std::span<const double> tau_opt);

}  // namespace extremal
