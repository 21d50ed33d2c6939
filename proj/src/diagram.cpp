#include "pcount/diagram.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace pcount {

std::size_t PersistenceDiagram::positive_dot_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(dots.begin(), dots.end(), [](const PersistenceDot& d) { return !d.zero_persistence(); }));
}

std::size_t count_from_diagram(const PersistenceDiagram& pd, double theta) {
  std::size_t n = pd.essentials.size();
  for (const auto& dot : pd.dots)
    if (dot.persistence() > theta) ++n;
  return n;
}

void sort_for_export(PersistenceDiagram& pd) {
  std::sort(pd.essentials.begin(), pd.essentials.end(), [](const EssentialClass& a, const EssentialClass& b) {
    if (a.birth != b.birth) return a.birth > b.birth;
    return a.birth_vertex < b.birth_vertex;
  });
  std::sort(pd.dots.begin(), pd.dots.end(), [](const PersistenceDot& a, const PersistenceDot& b) {
    const double pa = a.persistence(), pb = b.persistence();
    if (pa != pb) return pa > pb;
    if (a.birth_vertex != b.birth_vertex) return a.birth_vertex < b.birth_vertex;
    return a.death > b.death;
  });
}

void write_diagram_csv(std::ostream& os, PersistenceDiagram pd) {
  sort_for_export(pd);
  char line[160];
  os << "birth,death,persistence,birth_index,essential\n";
  for (const auto& e : pd.essentials) {
    std::snprintf(line, sizeof line, "%.6f,inf,inf,%zu,1\n", static_cast<double>(e.birth), e.birth_vertex);
    os << line;
  }
  for (const auto& d : pd.dots) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%zu,0\n", static_cast<double>(d.birth),
                  static_cast<double>(d.death), d.persistence(), d.birth_vertex);
    os << line;
  }
}

}  // namespace pcount
