#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace extremal::cli {

enum ExitCode : int { ok = 0, failure = 1, usage = 2, io = 3, calibration = 4 };

// Runs the command line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args);

// Accepts plain integers, scientific notation (1e5) and an `n` suffix
// meaning multiples of the instance size (200n). Throws std::invalid_argument.
std::uint64_t parse_steps(const std::string& text, std::size_t n);

// `a:b:step` or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

}  // namespace extremal::cli
