#include "extremal/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "extremal/errors.hpp"
#include "extremal/rng.hpp"
#include "extremal/trace_io.hpp"

namespace extremal {

Graph generate_erdos_renyi(std::size_t n, double c, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: n must be >= 1");
  if (c < 0.0 || (n > 1 && c > static_cast<double>(n - 1))) {
    throw std::invalid_argument("erdos_renyi: c must lie in [0, n-1]");
  }
  std::vector<Edge> edges;
  if (n < 2 || c == 0.0) return Graph(n, edges);
  const double p = c / static_cast<double>(n - 1);
  if (p >= 1.0) {
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    return Graph(n, edges);
  }
  // Geometric skipping over the lower triangle (Batagelj & Brandes).
  Rng rng(seed);
  const double log_q = std::log1p(-p);
  long v = 1;
  long w = -1;
  const long size = static_cast<long>(n);
  while (v < size) {
    const double r = uniform01(rng);
    w += 1 + static_cast<long>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < size) {
      w -= v;
      ++v;
    }
    if (v < size) edges.push_back({static_cast<Vertex>(w), static_cast<Vertex>(v)});
  }
  return Graph(n, edges);
}

std::vector<std::array<double, 2>> geometric_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<double, 2>> points(n);
  for (auto& p : points) {
    p[0] = uniform01(rng);
    p[1] = uniform01(rng);
  }
  return points;
}

namespace {

double torus_delta(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

Graph geometric_graph(std::span<const std::array<double, 2>> points, double radius) {
  const std::size_t n = points.size();
  std::vector<Edge> edges;
  if (radius <= 0.0 || n < 2) return Graph(n, edges);
  const double r2 = radius * radius;
  auto close = [&](std::size_t a, std::size_t b) {
    const double dx = torus_delta(points[a][0], points[b][0]);
    const double dy = torus_delta(points[a][1], points[b][1]);
    return dx * dx + dy * dy <= r2;
  };
  const auto cells = static_cast<long>(std::floor(1.0 / radius));
  if (cells < 3) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (close(a, b)) edges.push_back({static_cast<Vertex>(a), static_cast<Vertex>(b)});
      }
    }
    return Graph(n, edges);
  }
  // Cell lists with side >= radius; neighbors lie in the 3x3 block of cells.
  std::vector<std::vector<Vertex>> grid(static_cast<std::size_t>(cells * cells));
  auto cell_of = [&](double x) {
    return std::min(static_cast<long>(x * static_cast<double>(cells)), cells - 1);
  };
  for (std::size_t a = 0; a < n; ++a) {
    grid[static_cast<std::size_t>(cell_of(points[a][0]) * cells + cell_of(points[a][1]))].push_back(
        static_cast<Vertex>(a));
  }
  for (std::size_t a = 0; a < n; ++a) {
    const long cx = cell_of(points[a][0]);
    const long cy = cell_of(points[a][1]);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        const long gx = (cx + dx + cells) % cells;
        const long gy = (cy + dy + cells) % cells;
        for (Vertex b : grid[static_cast<std::size_t>(gx * cells + gy)]) {
          if (b > a && close(a, b)) edges.push_back({static_cast<Vertex>(a), b});
        }
      }
    }
  }
  return Graph(n, edges);
}

Graph generate_geometric(std::size_t n, double c, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("geometric: n must be >= 1");
  if (c < 0.0) throw std::invalid_argument("geometric: c must be >= 0");
  const double radius = std::sqrt(c / (std::numbers::pi * static_cast<double>(n)));
  if (radius > 0.5) throw std::invalid_argument("geometric: c too large for the unit torus");
  const auto points = geometric_points(n, seed);
  return geometric_graph(points, radius);
}

SpinGlass generate_pm_j_cubic(std::size_t L, std::uint64_t seed, std::vector<int> doubled_fields) {
  if (L < 2) throw std::invalid_argument("pm_j_cubic: L must be >= 2");
  const std::size_t n = L * L * L;
  Rng rng(seed);
  std::vector<Bond> bonds;
  bonds.reserve(3 * n);
  auto index = [L](std::size_t x, std::size_t y, std::size_t z) {
    return static_cast<Vertex>(x + L * (y + L * z));
  };
  for (std::size_t z = 0; z < L; ++z) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t x = 0; x < L; ++x) {
        const Vertex here = index(x, y, z);
        const Vertex ends[3] = {index((x + 1) % L, y, z), index(x, (y + 1) % L, z),
                                index(x, y, (z + 1) % L)};
        for (Vertex there : ends) bonds.push_back({here, there, coin_flip(rng) ? 1 : -1});
      }
    }
  }
  return SpinGlass(n, bonds, std::move(doubled_fields));
}

SpinGlass assign_pm_j(const Graph& graph, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Bond> bonds;
  bonds.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) bonds.push_back({e.u, e.v, coin_flip(rng) ? 1 : -1});
  return SpinGlass(graph.vertex_count(), bonds);
}

Instance generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::erdos_renyi:
      return generate_erdos_renyi(spec.n, spec.c, spec.seed);
    case GeneratorKind::geometric:
      return generate_geometric(spec.n, spec.c, spec.seed);
    case GeneratorKind::pm_j_cubic:
      return generate_pm_j_cubic(spec.L, spec.seed);
  }
  throw std::invalid_argument("unknown generator");
}

// ---------------------------------------------------------------------------
// Text I/O

namespace {

std::string format_field(int doubled) {
  if (doubled % 2 == 0) return std::to_string(doubled / 2);
  return format_number(0.5 * doubled);
}

struct LineReader {
  std::istream& in;
  std::size_t number = 0;
  std::string line;

  // Next non-blank, non-comment line; false at end of input.
  bool next() {
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
};

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
T parse_int(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

Vertex parse_index(std::string_view token, std::size_t n, std::size_t line) {
  const auto value = parse_int<std::uint64_t>(token, line, "vertex index");
  if (value < 1 || value > n) {
    throw ParseError(line, "vertex index " + std::string(token) + " outside 1.." + std::to_string(n));
  }
  return static_cast<Vertex>(value - 1);
}

}  // namespace

std::string format_instance(const Instance& instance) {
  std::ostringstream out;
  if (const auto* g = std::get_if<Graph>(&instance)) {
    out << "p graph " << g->vertex_count() << ' ' << g->edge_count() << '\n';
    for (const Edge& e : g->edges()) out << "e " << e.u + 1 << ' ' << e.v + 1 << '\n';
  } else {
    const auto& sg = std::get<SpinGlass>(instance);
    out << "p sg " << sg.spin_count() << ' ' << sg.bonds().size() << '\n';
    for (const Bond& b : sg.bonds()) out << "b " << b.i + 1 << ' ' << b.j + 1 << ' ' << b.coupling << '\n';
    if (sg.has_fields()) {
      for (std::size_t i = 0; i < sg.spin_count(); ++i) {
        if (sg.doubled_field(i) != 0) out << "h " << i + 1 << ' ' << format_field(sg.doubled_field(i)) << '\n';
      }
    }
  }
  return out.str();
}

Instance parse_instance(std::istream& in) {
  LineReader reader{in, 0, {}};
  if (!reader.next()) throw ParseError(1, "empty input, expected 'p graph' or 'p sg' header");
  const auto header = split(reader.line);
  const std::size_t header_line = reader.number;
  if (header.size() != 4 || header[0] != "p" || (header[1] != "graph" && header[1] != "sg")) {
    throw ParseError(header_line, "malformed header, expected 'p graph <n> <m>' or 'p sg <n> <m>'");
  }
  const auto n = parse_int<std::size_t>(header[2], header_line, "vertex count");
  const auto m = parse_int<std::size_t>(header[3], header_line, "edge count");
  const bool spin = header[1] == "sg";

  std::vector<Edge> edges;
  std::vector<Bond> bonds;
  std::vector<int> fields;
  std::size_t seen = 0;
  while (reader.next()) {
    const auto tok = split(reader.line);
    const std::size_t line = reader.number;
    if (!spin && tok[0] == "e") {
      if (tok.size() != 3) throw ParseError(line, "expected 'e <u> <v>'");
      edges.push_back({parse_index(tok[1], n, line), parse_index(tok[2], n, line)});
      if (edges.back().u == edges.back().v) throw ParseError(line, "self-loop");
      ++seen;
    } else if (spin && tok[0] == "b") {
      if (tok.size() != 4) throw ParseError(line, "expected 'b <i> <j> <J>'");
      const Vertex i = parse_index(tok[1], n, line);
      const Vertex j = parse_index(tok[2], n, line);
      if (i == j) throw ParseError(line, "self-bond");
      bonds.push_back({i, j, parse_int<int>(tok[3], line, "integer coupling")});
      ++seen;
    } else if (spin && tok[0] == "h") {
      if (tok.size() != 3) throw ParseError(line, "expected 'h <i> <value>'");
      const Vertex i = parse_index(tok[1], n, line);
      double value = 0.0;
      const auto res = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), value);
      if (res.ec != std::errc() || res.ptr != tok[2].data() + tok[2].size()) {
        throw ParseError(line, "invalid field value '" + std::string(tok[2]) + "'");
      }
      const double doubled = 2.0 * value;
      if (doubled != std::round(doubled) || std::fabs(doubled) > 1e9) {
        throw ParseError(line, "field values must be multiples of 0.5");
      }
      if (fields.empty()) fields.assign(n, 0);
      fields[i] = static_cast<int>(doubled);
    } else {
      throw ParseError(line, "unexpected line '" + reader.line + "'");
    }
  }
  if (seen != m) {
    throw ParseError(reader.number, "header announced " + std::to_string(m) + " entries, found " +
                                        std::to_string(seen));
  }
  try {
    if (spin) return SpinGlass(n, bonds, std::move(fields));
    return Graph(n, edges);
  } catch (const std::invalid_argument& e) {
    throw ParseError(header_line, e.what());
  }
}

Instance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_instance(in);
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_instance(instance);
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string instance_digest(const Instance& instance) { return hex64(fnv1a(format_instance(instance))); }

}  // namespace extremal
