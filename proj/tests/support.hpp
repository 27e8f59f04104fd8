#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <utility>
#include <vector>

#include "extremal/graph.hpp"
#include "extremal/problems.hpp"

namespace extremal::testing {

inline std::shared_ptr<const Graph> make_graph(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<Edge> list;
  for (auto [u, v] : edges) list.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  return std::make_shared<const Graph>(n, list);
}

inline std::shared_ptr<const Graph> complete_graph(std::size_t n) {
  std::vector<Edge> list;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) list.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return std::make_shared<const Graph>(n, list);
}

inline std::shared_ptr<const Graph> cycle_graph(std::size_t n) {
  std::vector<Edge> list;
  for (std::size_t u = 0; u < n; ++u) {
    list.push_back({static_cast<Vertex>(u), static_cast<Vertex>((u + 1) % n)});
  }
  return std::make_shared<const Graph>(n, list);
}

// Cost straight from the definitions, independent of the fitness code.
inline double cut_size(const Graph& g, const std::vector<State>& s) {
  double cut = 0;
  for (const Edge& e : g.edges()) cut += s[e.u] != s[e.v];
  return cut;
}

inline double monochromatic(const Graph& g, const std::vector<State>& s) {
  double mono = 0;
  for (const Edge& e : g.edges()) mono += s[e.u] == s[e.v];
  return mono;
}

inline double hamiltonian(const SpinGlass& sg, const std::vector<State>& s) {
  double h = 0;
  for (const Bond& b : sg.bonds()) h -= b.coupling * s[b.i] * s[b.j];
  for (std::size_t i = 0; i < sg.spin_count(); ++i) h -= sg.field(i) * s[i];
  return h;
}

}  // namespace extremal::testing
