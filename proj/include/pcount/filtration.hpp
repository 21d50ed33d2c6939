#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcount/diagram.hpp"
#include "pcount/exec.hpp"
#include "pcount/volume.hpp"

namespace pcount {

// Foreground voxels {p > mask_eps} in filtration order: probability
// descending, ties by ascending linear index. Adjacency is implicit
// 6-connectivity on `dims` restricted to these vertices.
struct ForegroundGraph {
  Dims dims;
  std::vector<std::uint32_t> vertex_ids;
  std::vector<float> vertex_values;

  std::size_t size() const noexcept { return vertex_ids.size(); }
};

ForegroundGraph build_filtration_order(const Volume& vol, double mask_eps = 0.0,
                                       Exec exec = Exec::parallel);

// Union-find over voxel indices. Roots are always birth voxels: a union keeps
// the older root (higher birth, then smaller index), so a root's birth value is
// the probability stored at the root itself.
class MergeForest {
 public:
  static constexpr std::int32_t kAbsent = -1;

  explicit MergeForest(std::size_t n_voxels) : parent_(n_voxels, kAbsent) {}

  bool contains(std::size_t v) const noexcept { return parent_[v] != kAbsent; }
  void add(std::size_t v) noexcept { parent_[v] = static_cast<std::int32_t>(v); }

  std::size_t find(std::size_t v) noexcept {
    std::size_t root = v;
    while (static_cast<std::size_t>(parent_[root]) != root) root = parent_[root];
    while (static_cast<std::size_t>(parent_[v]) != root) {
      const std::size_t next = parent_[v];
      parent_[v] = static_cast<std::int32_t>(root);
      v = next;
    }
    return root;
  }

  // Attaches the tree rooted at `younger` beneath `older`.
  void attach(std::size_t younger, std::size_t older) noexcept {
    parent_[younger] = static_cast<std::int32_t>(older);
  }

  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

struct PCountResult {
  std::size_t count = 0;
  // Per voxel: 0 for background, otherwise 1 + linear index of the surviving
  // root of its component.
  std::vector<std::uint32_t> labels;
  PersistenceDiagram diagram;
};

// Persistence-thresholded merging. Sweeps the foreground in filtration order;
// whenever an edge joins two components, the younger one (lower birth) is
// merged into the older one iff birth(younger) - level <= theta, and a dot is
// recorded either way. The count is the number of surviving components.
// The diagram's essentials are the classes that survive with all merges
// performed, one per connected component of the foreground.
PCountResult pcount_merge(const Volume& vol, double theta, double mask_eps = 0.0,
                          Exec exec = Exec::parallel);

// Canonical 0-dimensional superlevel persistence (every merge performed).
// Plateau merges show up as zero-persistence dots.
PersistenceDiagram compute_persistence(const Volume& vol, double mask_eps = 0.0,
                                       Exec exec = Exec::parallel);

}  // namespace pcount
