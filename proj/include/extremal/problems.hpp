#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "extremal/graph.hpp"
#include "extremal/ledger.hpp"
#include "extremal/rank.hpp"
#include "extremal/rng.hpp"

namespace extremal {

// Variable state: side 0/1 for bipartitioning, color 0..K-1, or spin +-1.
using State = std::int8_t;

// Current search point. Fitnesses and cost are kept in doubled units
// (every fitness is a multiple of 1/2), so cost2 == -sum(fitness2) holds
// exactly after any sequence of incremental updates.
struct Configuration {
  std::vector<State> states;
  std::vector<int> fitness2;
  std::int64_t cost2 = 0;

  double cost() const { return 0.5 * static_cast<double>(cost2); }
  double fitness(std::size_t i) const { return 0.5 * fitness2[i]; }
};

enum class ProblemKind { bipartition, coloring, spin_glass };

std::string_view to_string(ProblemKind kind);

// Metropolis view of a problem: single-variable moves on a (possibly
// relaxed) objective. Owns its own state.
class Annealer {
 public:
  virtual ~Annealer() = default;

  virtual void randomize(Rng& rng) = 0;
  virtual std::span<const State> states() const = 0;
  virtual double objective() const = 0;

  // Picks a uniformly random variable and a new value for it, returning the
  // objective change. The proposal is held until accept() or the next call.
  virtual double propose(Rng& rng) = 0;
  virtual void accept() = 0;

  // Feasible configuration closest to `states` under the true constraints.
  virtual std::vector<State> legalize(std::span<const State> states) const = 0;
};

class ProblemAdapter {
 public:
  virtual ~ProblemAdapter() = default;

  virtual ProblemKind kind() const = 0;
  virtual std::size_t size() const = 0;

  // Inclusive range of doubled fitness values any configuration can reach.
  virtual std::pair<int, int> fitness_bounds() const = 0;

  virtual std::vector<State> random_states(Rng& rng) const = 0;

  // 2 * lambda_i for the given state vector.
  virtual int doubled_fitness(std::size_t i, std::span<const State> states) const = 0;

  // Rank-selects the variable(s) to update through `policy` and `ledger`,
  // changes their state, and refreshes the fitness of every affected
  // variable. Throws AdapterMoveImpossible if no legal move is found.
  virtual void apply_move(Configuration& config, FitnessLedger& ledger, const TauPolicy& policy,
                          Rng& rng) const = 0;

  // Representative of the symmetry class of `states` (color permutations,
  // global side swap, or global spin flip when fields vanish).
  virtual std::vector<State> canonical(std::span<const State> states) const = 0;

  virtual bool feasible(std::span<const State> states) const;

  // Number of distinct values a single variable can take.
  virtual int state_count() const = 0;

  virtual std::unique_ptr<Annealer> make_annealer(double imbalance_weight) const = 0;

  Configuration configure(std::vector<State> states) const;
  FitnessLedger make_ledger(const Configuration& config) const;
  std::int64_t doubled_cost(std::span<const State> states) const;
  double cost(std::span<const State> states) const {
    return 0.5 * static_cast<double>(doubled_cost(states));
  }

 protected:
  // Recomputes the fitness of v from the current states, refiles it, and
  // adjusts the cost by the change.
  void refresh(std::size_t v, Configuration& config, FitnessLedger& ledger) const;
};

// Draws one rank from `policy` and resolves it through `ledger`.
std::size_t draw_variable(const TauPolicy& policy, const FitnessLedger& ledger, Rng& rng);

// Graph bipartitioning into two halves of exactly n/2 vertices.
// Fitness lambda_i = -b_i/2 with b_i the cut edges at i; moves are
// 1-exchanges between the two sides.
class BipartitionProblem final : public ProblemAdapter {
 public:
  enum class Partner {
    ranked,   // both vertices drawn from the rank distribution
    uniform,  // partner uniform over the opposite side
  };

  explicit BipartitionProblem(std::shared_ptr<const Graph> graph, Partner partner = Partner::ranked);

  const Graph& graph() const { return *graph_; }
  Partner partner() const { return partner_; }

  ProblemKind kind() const override { return ProblemKind::bipartition; }
  std::size_t size() const override { return graph_->vertex_count(); }
  std::pair<int, int> fitness_bounds() const override;
  std::vector<State> random_states(Rng& rng) const override;
  int doubled_fitness(std::size_t i, std::span<const State> states) const override;
  void apply_move(Configuration& config, FitnessLedger& ledger, const TauPolicy& policy,
                  Rng& rng) const override;
  std::vector<State> canonical(std::span<const State> states) const override;
  bool feasible(std::span<const State> states) const override;
  int state_count() const override { return 2; }
  std::unique_ptr<Annealer> make_annealer(double imbalance_weight) const override;

  std::size_t cut_size(std::span<const State> states) const;

 private:
  std::shared_ptr<const Graph> graph_;
  Partner partner_;
};

// MAX-K-COL: minimize monochromatic edges with K colors.
// Fitness lambda_i = -b_i/2 with b_i the monochromatic edges at i; a move
// recolors one vertex with a uniformly drawn different color.
class ColoringProblem final : public ProblemAdapter {
 public:
  ColoringProblem(std::shared_ptr<const Graph> graph, int colors);

  const Graph& graph() const { return *graph_; }
  int colors() const { return colors_; }

  ProblemKind kind() const override { return ProblemKind::coloring; }
  std::size_t size() const override { return graph_->vertex_count(); }
  std::pair<int, int> fitness_bounds() const override;
  std::vector<State> random_states(Rng& rng) const override;
  int doubled_fitness(std::size_t i, std::span<const State> states) const override;
  void apply_move(Configuration& config, FitnessLedger& ledger, const TauPolicy& policy,
                  Rng& rng) const override;
  std::vector<State> canonical(std::span<const State> states) const override;
  int state_count() const override { return colors_; }
  std::unique_ptr<Annealer> make_annealer(double imbalance_weight) const override;

 private:
  std::shared_ptr<const Graph> graph_;
  int colors_;
};

// Ising spin glass, C(S) = -sum_bonds J_ij x_i x_j - sum_i h_i x_i.
// Fitness lambda_i = x_i (1/2 sum_j J_ij x_j + h_i); moves flip one spin.
class SpinGlassProblem final : public ProblemAdapter {
 public:
  explicit SpinGlassProblem(std::shared_ptr<const SpinGlass> instance);

  const SpinGlass& instance() const { return *instance_; }

  ProblemKind kind() const override { return ProblemKind::spin_glass; }
  std::size_t size() const override { return instance_->spin_count(); }
  std::pair<int, int> fitness_bounds() const override;
  std::vector<State> random_states(Rng& rng) const override;
  int doubled_fitness(std::size_t i, std::span<const State> states) const override;
  void apply_move(Configuration& config, FitnessLedger& ledger, const TauPolicy& policy,
                  Rng& rng) const override;
  std::vector<State> canonical(std::span<const State> states) const override;
  int state_count() const override { return 2; }
  std::unique_ptr<Annealer> make_annealer(double imbalance_weight) const override;

 private:
  std::shared_ptr<const SpinGlass> instance_;
  std::pair<int, int> bounds_;
};

}  // namespace extremal
