#include "extremal/problems.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "extremal/errors.hpp"

namespace extremal {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::bipartition:
      return "gbp";
    case ProblemKind::coloring:
      return "color";
    case ProblemKind::spin_glass:
      return "spinglass";
  }
  return "unknown";
}

bool ProblemAdapter::feasible(std::span<const State>) const { return true; }

Configuration ProblemAdapter::configure(std::vector<State> states) const {
  if (states.size() != size()) throw std::invalid_argument("state vector has wrong length");
  Configuration config;
  config.states = std::move(states);
  config.fitness2.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    config.fitness2[i] = doubled_fitness(i, config.states);
    config.cost2 -= config.fitness2[i];
  }
  return config;
}

FitnessLedger ProblemAdapter::make_ledger(const Configuration& config) const {
  const auto [lo, hi] = fitness_bounds();
  return FitnessLedger(lo, hi, config.fitness2);
}

std::int64_t ProblemAdapter::doubled_cost(std::span<const State> states) const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) total -= doubled_fitness(i, states);
  return total;
}

void ProblemAdapter::refresh(std::size_t v, Configuration& config, FitnessLedger& ledger) const {
  const int updated = doubled_fitness(v, config.states);
  const int delta = updated - config.fitness2[v];
  if (delta == 0) return;
  config.fitness2[v] = updated;
  config.cost2 -= delta;
  ledger.refile(v, updated);
}

std::size_t draw_variable(const TauPolicy& policy, const FitnessLedger& ledger, Rng& rng) {
  return ledger.select_by_rank(policy.sample_rank(uniform01(rng)), rng);
}

// ---------------------------------------------------------------------------
// Bipartitioning

namespace {

class BipartitionAnnealer final : public Annealer {
 public:
  BipartitionAnnealer(const Graph& graph, double weight) : graph_(graph), weight_(weight) {}

  void randomize(Rng& rng) override {
    const std::size_t n = graph_.vertex_count();
    states_.resize(n);
    for (auto& s : states_) s = static_cast<State>(coin_flip(rng));
    recount();
  }

  std::span<const State> states() const override { return states_; }

  double objective() const override {
    return static_cast<double>(cut_) + weight_ * static_cast<double>(imbalance_ * imbalance_);
  }

  double propose(Rng& rng) override {
    pending_ = uniform_below(rng, states_.size());
    const State side = states_[pending_];
    long same = 0;
    for (Vertex u : graph_.neighbors(pending_)) same += states_[u] == side;
    const long opposite = static_cast<long>(graph_.degree(pending_)) - same;
    pending_cut_delta_ = same - opposite;
    const long moved = imbalance_ + (side == 0 ? 2 : -2);
    return static_cast<double>(pending_cut_delta_) +
           weight_ * static_cast<double>(moved * moved - imbalance_ * imbalance_);
  }

  void accept() override {
    const State side = states_[pending_];
    states_[pending_] = static_cast<State>(1 - side);
    imbalance_ += side == 0 ? 2 : -2;
    cut_ += pending_cut_delta_;
  }

  std::vector<State> legalize(std::span<const State> states) const override {
    std::vector<State> fixed(states.begin(), states.end());
    long balance = 0;  // |side 1| - |side 0|
    for (State s : fixed) balance += s == 1 ? 1 : -1;
    while (balance != 0) {
      const State heavy = balance > 0 ? 1 : 0;
      std::size_t best = fixed.size();
      long best_delta = std::numeric_limits<long>::max();
      for (std::size_t v = 0; v < fixed.size(); ++v) {
        if (fixed[v] != heavy) continue;
        long same = 0;
        for (Vertex u : graph_.neighbors(v)) same += fixed[u] == heavy;
        const long delta = 2 * same - static_cast<long>(graph_.degree(v));
        if (delta < best_delta) {
          best_delta = delta;
          best = v;
        }
      }
      fixed[best] = static_cast<State>(1 - heavy);
      balance += heavy == 1 ? -2 : 2;
    }
    return fixed;
  }

 private:
  void recount() {
    imbalance_ = 0;
    for (State s : states_) imbalance_ += s == 1 ? 1 : -1;
    cut_ = 0;
    for (const Edge& e : graph_.edges()) cut_ += states_[e.u] != states_[e.v];
  }

  const Graph& graph_;
  double weight_;
  std::vector<State> states_;
  long imbalance_ = 0;
  long cut_ = 0;
  std::size_t pending_ = 0;
  long pending_cut_delta_ = 0;
};

}  // namespace

BipartitionProblem::BipartitionProblem(std::shared_ptr<const Graph> graph, Partner partner)
    : graph_(std::move(graph)), partner_(partner) {
  if (!graph_) throw std::invalid_argument("BipartitionProblem: null graph");
  const std::size_t n = graph_->vertex_count();
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("bipartitioning needs an even vertex count >= 2, got " +
                                std::to_string(n));
  }
}

std::pair<int, int> BipartitionProblem::fitness_bounds() const {
  return {-static_cast<int>(graph_->max_degree()), 0};
}

std::vector<State> BipartitionProblem::random_states(Rng& rng) const {
  const std::size_t n = size();
  std::vector<State> states(n, 0);
  std::fill(states.begin() + static_cast<long>(n / 2), states.end(), State{1});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(states[i], states[uniform_below(rng, i + 1)]);
  }
  return states;
}

int BipartitionProblem::doubled_fitness(std::size_t i, std::span<const State> states) const {
  int cut = 0;
  for (Vertex u : graph_->neighbors(i)) cut += states[u] != states[i];
  return -cut;
}

void BipartitionProblem::apply_move(Configuration& config, FitnessLedger& ledger,
                                    const TauPolicy& policy, Rng& rng) const {
  const std::size_t n = size();
  const std::size_t first = draw_variable(policy, ledger, rng);
  const State side = config.states[first];
  std::size_t second = n;
  for (std::size_t attempt = 0; attempt < 64 * n; ++attempt) {
    const std::size_t candidate = partner_ == Partner::ranked
                                      ? draw_variable(policy, ledger, rng)
                                      : static_cast<std::size_t>(uniform_below(rng, n));
    if (config.states[candidate] != side) {
      second = candidate;
      break;
    }
  }
  if (second == n) {
    throw AdapterMoveImpossible("no partner on the opposite side after " + std::to_string(64 * n) +
                                " draws");
  }
  config.states[first] = static_cast<State>(1 - config.states[first]);
  config.states[second] = static_cast<State>(1 - config.states[second]);
  refresh(first, config, ledger);
  refresh(second, config, ledger);
  for (Vertex u : graph_->neighbors(first)) refresh(u, config, ledger);
  for (Vertex u : graph_->neighbors(second)) refresh(u, config, ledger);
}

std::vector<State> BipartitionProblem::canonical(std::span<const State> states) const {
  std::vector<State> out(states.begin(), states.end());
  if (!out.empty() && out[0] == 1) {
    for (auto& s : out) s = static_cast<State>(1 - s);
  }
  return out;
}

bool BipartitionProblem::feasible(std::span<const State> states) const {
  const auto ones = std::count(states.begin(), states.end(), State{1});
  return static_cast<std::size_t>(ones) * 2 == states.size();
}

std::unique_ptr<Annealer> BipartitionProblem::make_annealer(double imbalance_weight) const {
  return std::make_unique<BipartitionAnnealer>(*graph_, imbalance_weight);
}

std::size_t BipartitionProblem::cut_size(std::span<const State> states) const {
  std::size_t cut = 0;
  for (const Edge& e : graph_->edges()) cut += states[e.u] != states[e.v];
  return cut;
}

// ---------------------------------------------------------------------------
// Coloring

namespace {

State other_color(State current, int colors, Rng& rng) {
  auto pick = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(colors - 1)));
  if (pick >= current) ++pick;
  return static_cast<State>(pick);
}

class ColoringAnnealer final : public Annealer {
 public:
  ColoringAnnealer(const Graph& graph, int colors) : graph_(graph), colors_(colors) {}

  void randomize(Rng& rng) override {
    states_.resize(graph_.vertex_count());
    for (auto& s : states_) s = static_cast<State>(uniform_below(rng, colors_));
    conflicts_ = 0;
    for (const Edge& e : graph_.edges()) conflicts_ += states_[e.u] == states_[e.v];
  }

  std::span<const State> states() const override { return states_; }
  double objective() const override { return static_cast<double>(conflicts_); }

  double propose(Rng& rng) override {
    pending_ = uniform_below(rng, states_.size());
    const State old = states_[pending_];
    pending_color_ = other_color(old, colors_, rng);
    long delta = 0;
    for (Vertex u : graph_.neighbors(pending_)) {
      delta += (states_[u] == pending_color_) - (states_[u] == old);
    }
    pending_delta_ = delta;
    return static_cast<double>(delta);
  }

  void accept() override {
    states_[pending_] = pending_color_;
    conflicts_ += pending_delta_;
  }

  std::vector<State> legalize(std::span<const State> states) const override {
    return {states.begin(), states.end()};
  }

 private:
  const Graph& graph_;
  int colors_;
  std::vector<State> states_;
  long conflicts_ = 0;
  std::size_t pending_ = 0;
  State pending_color_ = 0;
  long pending_delta_ = 0;
};

}  // namespace

ColoringProblem::ColoringProblem(std::shared_ptr<const Graph> graph, int colors)
    : graph_(std::move(graph)), colors_(colors) {
  if (!graph_) throw std::invalid_argument("ColoringProblem: null graph");
  if (colors < 2 || colors > std::numeric_limits<State>::max()) {
    throw std::invalid_argument("color count must be in [2, 127], got " + std::to_string(colors));
  }
}

std::pair<int, int> ColoringProblem::fitness_bounds() const {
  return {-static_cast<int>(graph_->max_degree()), 0};
}

std::vector<State> ColoringProblem::random_states(Rng& rng) const {
  std::vector<State> states(size());
  for (auto& s : states) s = static_cast<State>(uniform_below(rng, colors_));
  return states;
}

int ColoringProblem::doubled_fitness(std::size_t i, std::span<const State> states) const {
  int mono = 0;
  for (Vertex u : graph_->neighbors(i)) mono += states[u] == states[i];
  return -mono;
}

void ColoringProblem::apply_move(Configuration& config, FitnessLedger& ledger,
                                 const TauPolicy& policy, Rng& rng) const {
  const std::size_t v = draw_variable(policy, ledger, rng);
  config.states[v] = other_color(config.states[v], colors_, rng);
  refresh(v, config, ledger);
  for (Vertex u : graph_->neighbors(v)) refresh(u, config, ledger);
}

std::vector<State> ColoringProblem::canonical(std::span<const State> states) const {
  std::array<State, 128> relabel;
  relabel.fill(-1);
  State next = 0;
  std::vector<State> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& slot = relabel[static_cast<std::size_t>(states[i])];
    if (slot < 0) slot = next++;
    out[i] = slot;
  }
  return out;
}

std::unique_ptr<Annealer> ColoringProblem::make_annealer(double) const {
  return std::make_unique<ColoringAnnealer>(*graph_, colors_);
}

// ---------------------------------------------------------------------------
// Spin glass

namespace {

class SpinGlassAnnealer final : public Annealer {
 public:
  explicit SpinGlassAnnealer(const SpinGlass& instance) : instance_(instance) {}

  void randomize(Rng& rng) override {
    states_.resize(instance_.spin_count());
    for (auto& s : states_) s = coin_flip(rng) ? State{1} : State{-1};
    long twice = 0;
    for (const Bond& b : instance_.bonds()) twice -= 2L * b.coupling * states_[b.i] * states_[b.j];
    for (std::size_t i = 0; i < states_.size(); ++i) twice -= instance_.doubled_field(i) * states_[i];
    energy2_ = twice;
  }

  std::span<const State> states() const override { return states_; }
  double objective() const override { return 0.5 * static_cast<double>(energy2_); }

  double propose(Rng& rng) override {
    pending_ = uniform_below(rng, states_.size());
    long local = 0;
    for (const Coupling& c : instance_.couplings(pending_)) local += c.coupling * states_[c.other];
    pending_delta2_ = 2L * states_[pending_] * (2 * local + instance_.doubled_field(pending_));
    return 0.5 * static_cast<double>(pending_delta2_);
  }

  void accept() override {
    states_[pending_] = static_cast<State>(-states_[pending_]);
    energy2_ += pending_delta2_;
  }

  std::vector<State> legalize(std::span<const State> states) const override {
    return {states.begin(), states.end()};
  }

 private:
  const SpinGlass& instance_;
  std::vector<State> states_;
  long energy2_ = 0;
  std::size_t pending_ = 0;
  long pending_delta2_ = 0;
};

}  // namespace

SpinGlassProblem::SpinGlassProblem(std::shared_ptr<const SpinGlass> instance)
    : instance_(std::move(instance)) {
  if (!instance_) throw std::invalid_argument("SpinGlassProblem: null instance");
  if (instance_->spin_count() == 0) throw std::invalid_argument("spin glass has no spins");
  int bound = 0;
  for (std::size_t i = 0; i < instance_->spin_count(); ++i) {
    bound = std::max(bound, instance_->doubled_fitness_bound(i));
  }
  bounds_ = {-bound, bound};
}

std::pair<int, int> SpinGlassProblem::fitness_bounds() const { return bounds_; }

std::vector<State> SpinGlassProblem::random_states(Rng& rng) const {
  std::vector<State> states(size());
  for (auto& s : states) s = coin_flip(rng) ? State{1} : State{-1};
  return states;
}

int SpinGlassProblem::doubled_fitness(std::size_t i, std::span<const State> states) const {
  int local = instance_->doubled_field(i);
  for (const Coupling& c : instance_->couplings(i)) local += c.coupling * states[c.other];
  return states[i] * local;
}

void SpinGlassProblem::apply_move(Configuration& config, FitnessLedger& ledger,
                                  const TauPolicy& policy, Rng& rng) const {
  const std::size_t v = draw_variable(policy, ledger, rng);
  config.states[v] = static_cast<State>(-config.states[v]);
  refresh(v, config, ledger);
  for (const Coupling& c : instance_->couplings(v)) refresh(c.other, config, ledger);
}

std::vector<State> SpinGlassProblem::canonical(std::span<const State> states) const {
  std::vector<State> out(states.begin(), states.end());
  if (!instance_->has_fields() && !out.empty() && out[0] < 0) {
    for (auto& s : out) s = static_cast<State>(-s);
  }
  return out;
}

std::unique_ptr<Annealer> SpinGlassProblem::make_annealer(double) const {
  return std::make_unique<SpinGlassAnnealer>(*instance_);
}

}  // namespace extremal
