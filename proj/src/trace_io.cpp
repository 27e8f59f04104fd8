#include "extremal/trace_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "extremal/errors.hpp"

namespace extremal {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::string_view manifest_ref) {
  if (!manifest_ref.empty()) out << "# manifest " << manifest_ref << '\n';
  out << "step,cost,best_cost\n";
  for (const TraceSample& s : trace.samples) {
    out << s.step << ',' << format_number(s.cost) << ',' << format_number(s.best_cost) << '\n';
  }
}

std::vector<TraceSample> read_trace_csv(std::istream& in) {
  std::vector<TraceSample> samples;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "step,cost,best_cost") throw ParseError(number, "expected header step,cost,best_cost");
      header = true;
      continue;
    }
    TraceSample s{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(p, end, s.step);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') throw ParseError(number, "bad step");
    auto r2 = std::from_chars(r1.ptr + 1, end, s.cost);
    if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',') throw ParseError(number, "bad cost");
    auto r3 = std::from_chars(r2.ptr + 1, end, s.best_cost);
    if (r3.ec != std::errc() || r3.ptr != end) throw ParseError(number, "bad best_cost");
    samples.push_back(s);
  }
  if (!header) throw ParseError(number, "missing header");
  return samples;
}

}  // namespace extremal
