#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace extremal {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable simple undirected graph in compressed adjacency form.
class Graph {
 public:
  Graph() = default;

  // Throws std::invalid_argument on self-loops, duplicate edges, or
  // endpoints out of range. Edge orientation is irrelevant.
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Vertex> neighbors(std::size_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;

  // Mean connectivity c = 2m/n.
  double mean_degree() const;

  // Canonical edge list: u < v, sorted lexicographically.
  std::span<const Edge> edges() const { return edges_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.vertex_count() == b.vertex_count() && a.edges_ == b.edges_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
};

struct Bond {
  Vertex i;
  Vertex j;
  int coupling;
  friend bool operator==(const Bond&, const Bond&) = default;
  friend auto operator<=>(const Bond&, const Bond&) = default;
};

struct Coupling {
  Vertex other;
  int coupling;
};

// Ising spin glass with integer couplings and half-integer fields.
//
// Fields are stored doubled so every per-spin fitness is an exact integer
// in doubled units. Bonds form a multiset: the periodic L = 2 lattice wraps
// onto the same pair twice and keeps both bonds.
class SpinGlass {
 public:
  SpinGlass() = default;

  // Throws std::invalid_argument on self-bonds or indices out of range.
  SpinGlass(std::size_t n, std::span<const Bond> bonds, std::vector<int> doubled_fields = {});

  std::size_t spin_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Bond> bonds() const { return bonds_; }
  std::span<const Coupling> couplings(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  int doubled_field(std::size_t i) const { return fields2_.empty() ? 0 : fields2_[i]; }
  double field(std::size_t i) const { return 0.5 * doubled_field(i); }
  bool has_fields() const;

  // Largest |2 lambda_i| any configuration can produce at spin i.
  int doubled_fitness_bound(std::size_t i) const;

  friend bool operator==(const SpinGlass& a, const SpinGlass& b) {
    return a.spin_count() == b.spin_count() && a.bonds_ == b.bonds_ &&
           a.has_fields() == b.has_fields() &&
           (!a.has_fields() || a.fields2_ == b.fields2_);
  }

 private:
  std::vector<Bond> bonds_;
  std::vector<int> fields2_;
  std::vector<std::size_t> offsets_;
  std::vector<Coupling> adjacency_;
};

}  // namespace extremal
