#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pcount {

// One finite class of the superlevel filtration: born at probability `birth`
// (its highest voxel), dead at `death` when it merged into an older class.
struct PersistenceDot {
  float birth = 0.0f;
  float death = 0.0f;
  std::size_t birth_vertex = 0;

  // Lifetime in probability units. Computed in double so the difference of two
  // floats is exact; every threshold comparison goes through this.
  double persistence() const noexcept {
    return static_cast<double>(birth) - static_cast<double>(death);
  }
  // Plateau artifact: a class that was born and died at the same level.
  bool zero_persistence() const noexcept { return birth == death; }

  friend bool operator==(const PersistenceDot&, const PersistenceDot&) = default;
};

// A class that never merges inside the foreground.
struct EssentialClass {
  float birth = 0.0f;
  std::size_t birth_vertex = 0;

  friend bool operator==(const EssentialClass&, const EssentialClass&) = default;
};

struct PersistenceDiagram {
  std::vector<PersistenceDot> dots;
  std::vector<EssentialClass> essentials;

  // Dots with birth > death.
  std::size_t positive_dot_count() const noexcept;
};

// |essentials| + |{dots : persistence > theta}|.
std::size_t count_from_diagram(const PersistenceDiagram& pd, double theta);

// Essentials first (birth descending), then dots (persistence descending);
// ties by birth vertex ascending.
void sort_for_export(PersistenceDiagram& pd);

// CSV with header `birth,death,persistence,birth_index,essential`. Essentials
// carry `inf` death and persistence. Rows follow sort_for_export order.
void write_diagram_csv(std::ostream& os, PersistenceDiagram pd);

}  // namespace pcount
