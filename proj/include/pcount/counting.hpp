#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pcount/diagram.hpp"
#include "pcount/exec.hpp"
#include "pcount/volume.hpp"

namespace pcount {

enum class Method { persistence, direct_threshold };

std::string_view to_string(Method m) noexcept;
// Accepts "persistence", "threshold" and "direct_threshold".
Method parse_method(std::string_view text);

// Number of 6-connected components of {p >= tau}. Small components are kept.
// The comparison is done in the data's float precision.
std::size_t direct_threshold_count(const Volume& vol, double tau);

struct SweepResult {
  Method method = Method::persistence;
  std::vector<double> thresholds;
  std::vector<std::size_t> counts;
};

// counts[i] = direct_threshold_count(vol, taus[i]).
SweepResult sweep_direct(const Volume& vol, const std::vector<double>& taus,
                         Exec exec = Exec::parallel);

// One diagram, then count_from_diagram per grid value.
SweepResult sweep_persistence(const Volume& vol, const std::vector<double>& thetas,
                              double mask_eps = 0.0, Exec exec = Exec::parallel);
SweepResult sweep_persistence(const PersistenceDiagram& pd, const std::vector<double>& thetas);

// Header `method,threshold,count`; thresholds with 6 decimals.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace pcount
