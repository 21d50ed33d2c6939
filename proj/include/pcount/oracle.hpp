#pragma once

// Brute-force reference routines. Slow and single-threaded; used by tests,
// the acceptance suite and the benchmark. Nothing here touches the
// union-find filtration code.

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "pcount/diagram.hpp"
#include "pcount/volume.hpp"

namespace pcount::oracle {

// Breadth-first flood fill of {p >= tau} (float comparison, as in counting).
// Each component is identified by its smallest linear index.
std::set<std::size_t> brute_force_components(const Volume& vol, double tau);

// Per-voxel component id (smallest linear index) of {p >= level, p > mask_eps};
// -1 outside the set.
std::vector<std::int64_t> flood_fill_labels(const Volume& vol, float level, double mask_eps);

struct LevelSweepTrace {
  std::vector<float> levels;                             // distinct, descending
  std::vector<std::vector<std::int64_t>> labels_at_level;  // flood_fill_labels per level
  std::vector<std::set<std::size_t>> components_at_level;
};

LevelSweepTrace level_sweep_trace(const Volume& vol, double mask_eps = 0.0);

// True when every component at each level lies inside a single component at
// the next (lower) level.
bool is_nested(const LevelSweepTrace& trace);

// Diagram from repeated flood fills at every distinct level. Only classes with
// positive lifetime are produced (no plateau artifacts).
PersistenceDiagram brute_force_diagram(const Volume& vol, double mask_eps = 0.0);

}  // namespace pcount::oracle
