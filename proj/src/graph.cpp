#include "extremal/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace extremal {

Graph::Graph(std::size_t n, std::span<const Edge> edges) {
  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
    }
    if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
    edges_.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  }
  std::sort(edges_.begin(), edges_.end());
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw std::invalid_argument("duplicate edge " + std::to_string(dup->u) + "-" +
                                std::to_string(dup->v));
  }

  offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    adjacency_[fill[e.v]++] = e.u;
  }
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < vertex_count(); ++v) best = std::max(best, degree(v));
  return best;
}

double Graph::mean_degree() const {
  if (vertex_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(vertex_count());
}

SpinGlass::SpinGlass(std::size_t n, std::span<const Bond> bonds, std::vector<int> doubled_fields)
    : fields2_(std::move(doubled_fields)) {
  if (!fields2_.empty() && fields2_.size() != n) {
    throw std::invalid_argument("field vector length does not match spin count");
  }
  bonds_.reserve(bonds.size());
  for (const Bond& b : bonds) {
    if (b.i >= n || b.j >= n) {
      throw std::invalid_argument("bond endpoint out of range: " + std::to_string(b.i) + "-" +
                                  std::to_string(b.j));
    }
    if (b.i == b.j) throw std::invalid_argument("self-bond at spin " + std::to_string(b.i));
    bonds_.push_back(b.i < b.j ? b : Bond{b.j, b.i, b.coupling});
  }
  std::sort(bonds_.begin(), bonds_.end());

  offsets_.assign(n + 1, 0);
  for (const Bond& b : bonds_) {
    ++offsets_[b.i + 1];
    ++offsets_[b.j + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(2 * bonds_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Bond& b : bonds_) {
    adjacency_[fill[b.i]++] = {b.j, b.coupling};
    adjacency_[fill[b.j]++] = {b.i, b.coupling};
  }
}

bool SpinGlass::has_fields() const {
  return std::any_of(fields2_.begin(), fields2_.end(), [](int h) { return h != 0; });
}

int SpinGlass::doubled_fitness_bound(std::size_t i) const {
  int bound = std::abs(doubled_field(i));
  for (const Coupling& c : couplings(i)) bound += std::abs(c.coupling);
  return bound;
}

}  // namespace extremal
