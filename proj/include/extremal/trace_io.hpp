#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "extremal/engine.hpp"

namespace extremal {

// Shortest round-trip decimal representation.
std::string format_number(double value);

// CSV with header `step,cost,best_cost`, preceded by `# manifest <ref>`
// when a manifest reference is given.
void write_trace_csv(std::ostream& out, const RunTrace& trace, std::string_view manifest_ref = {});

// Parses the samples of a trace CSV; comment lines are skipped.
std::vector<TraceSample> read_trace_csv(std::istream& in);

}  // namespace extremal
