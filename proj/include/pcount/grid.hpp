#pragma once

#include <string_view>
#include <vector>

namespace pcount {

// Inclusive arithmetic range start, start+step, ... up to stop. The stop
// value is included when (stop - start) / step is within 1e-9 of an integer.
// Values are rounded to 12 decimals so 0.1-step grids print cleanly.
std::vector<double> make_grid(double start, double stop, double step);

// Parses "A:B:STEP". Throws InvalidArgument on syntax errors, non-positive
// steps and stop < start.
std::vector<double> parse_grid(std::string_view text);

// Probability thresholds 0.1, 0.2, ..., 1.0.
std::vector<double> default_direct_grid();
// Persistence thresholds 0, 0.004, ..., 0.04.
std::vector<double> default_persistence_grid();

// Throws InvalidArgument unless the grid is nonempty and strictly increasing.
void require_increasing(const std::vector<double>& grid, std::string_view what);

}  // namespace pcount
