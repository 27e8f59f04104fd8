#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "extremal/graph.hpp"

namespace extremal {

using Instance = std::variant<Graph, SpinGlass>;

enum class GeneratorKind { erdos_renyi, geometric, pm_j_cubic };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::erdos_renyi;
  std::size_t n = 0;    // vertices (graph generators)
  std::size_t L = 0;    // lattice side (pm_j_cubic)
  double c = 0.0;       // target mean connectivity (graph generators)
  std::uint64_t seed = 0;
};

// G(n, p) with p = c / (n - 1).
Graph generate_erdos_renyi(std::size_t n, double c, std::uint64_t seed);

// n uniform points on the unit torus joined when their torus distance is
// at most r = sqrt(c / (pi n)).
Graph generate_geometric(std::size_t n, double c, std::uint64_t seed);

// Unit-torus geometric graph on given points.
Graph geometric_graph(std::span<const std::array<double, 2>> points, double radius);

// Uniform points used by generate_geometric for the same (n, seed).
std::vector<std::array<double, 2>> geometric_points(std::size_t n, std::uint64_t seed);

// Periodic L x L x L lattice with 3 L^3 bonds of random sign. Doubled
// fields (2 h_i) may be given; they default to zero.
SpinGlass generate_pm_j_cubic(std::size_t L, std::uint64_t seed, std::vector<int> doubled_fields = {});

// Random +-1 couplings on the edges of an arbitrary graph.
SpinGlass assign_pm_j(const Graph& graph, std::uint64_t seed);

Instance generate(const GeneratorSpec& spec);

// Text formats:
//   graph:      `p graph <n> <m>` then m lines `e <u> <v>` (1-based)
//   spin glass: `p sg <n> <m>` then m lines `b <i> <j> <J>` and optional
//               `h <i> <value>` lines
// Lines starting with '#' are comments. Output is canonical (sorted), so
// write/read/write is byte-stable.
std::string format_instance(const Instance& instance);
Instance parse_instance(std::istream& in);
Instance parse_instance(std::string_view text);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

// 64-bit FNV-1a digest of the canonical text form, as 16 hex digits.
std::string instance_digest(const Instance& instance);
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace extremal
