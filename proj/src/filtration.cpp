#include "pcount/filtration.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include <parallel/algorithm>

#include "pcount/error.hpp"

namespace pcount {
namespace {

// Sort key realising the filtration order: probability descending, then
// linear index ascending. Non-negative floats order like their bit patterns.
inline std::uint64_t filtration_key(float p, std::size_t index) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(p);
  return (static_cast<std::uint64_t>(0xffffffffu - bits) << 32) | static_cast<std::uint32_t>(index);
}

inline std::uint32_t key_index(std::uint64_t key) { return static_cast<std::uint32_t>(key); }

void require_indexable(const Volume& vol) {
  if (vol.data.size() != vol.dims.size()) throw InvalidArgument("volume dims do not match data length");
  if (vol.data.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw InvalidArgument("volume too large for 32-bit voxel indices");
}

std::vector<std::uint64_t> gather_keys_serial(const Volume& vol, double mask_eps) {
  std::vector<std::uint64_t> keys;
  for (std::size_t i = 0; i < vol.data.size(); ++i)
    if (static_cast<double>(vol.data[i]) > mask_eps) keys.push_back(filtration_key(vol.data[i], i));
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::uint64_t> gather_keys_parallel(const Volume& vol, double mask_eps) {
  const std::size_t slice = vol.dims.nx * vol.dims.ny;
  const auto nz = static_cast<std::int64_t>(vol.dims.nz);
  std::vector<std::size_t> offsets(vol.dims.nz + 1, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t z = 0; z < nz; ++z) {
    std::size_t n = 0;
    const float* row = vol.data.data() + static_cast<std::size_t>(z) * slice;
    for (std::size_t i = 0; i < slice; ++i)
      if (static_cast<double>(row[i]) > mask_eps) ++n;
    offsets[static_cast<std::size_t>(z) + 1] = n;
  }
  for (std::size_t z = 0; z < vol.dims.nz; ++z) offsets[z + 1] += offsets[z];

  std::vector<std::uint64_t> keys(offsets.back());
#pragma omp parallel for schedule(static)
  for (std::int64_t z = 0; z < nz; ++z) {
    std::size_t out = offsets[static_cast<std::size_t>(z)];
    const std::size_t base = static_cast<std::size_t>(z) * slice;
    for (std::size_t i = 0; i < slice; ++i)
      if (static_cast<double>(vol.data[base + i]) > mask_eps) keys[out++] = filtration_key(vol.data[base + i], base + i);
  }
  // Keys are unique, so the parallel sort is as deterministic as std::sort.
  __gnu_parallel::sort(keys.begin(), keys.end());
  return keys;
}

// Elder rule: higher birth is older; equal births go to the smaller index.
inline bool is_older(const std::vector<float>& data, std::size_t a, std::size_t b) {
  if (data[a] != data[b]) return data[a] > data[b];
  return a < b;
}

// One pass over the filtration. `full` performs every merge and yields the
// canonical diagram and the essentials. When `cut` is given it is the
// persistence-thresholded forest, and its merge attempts are what get
// recorded as dots.
void sweep(const Volume& vol, const ForegroundGraph& graph, MergeForest& full, MergeForest* cut,
           double theta, PersistenceDiagram& pd) {
  const auto& data = vol.data;
  for (std::size_t k = 0; k < graph.size(); ++k) {
    const std::size_t v = graph.vertex_ids[k];
    const float level = graph.vertex_values[k];
    full.add(v);
    if (cut) cut->add(v);

    bool v_attached = false;
    bool v_attached_cut = false;
    for_each_face_neighbor(graph.dims, v, [&](std::size_t u) {
      if (!full.contains(u)) return;  // background, or later in the order

      {
        const std::size_t ru = full.find(u), rv = full.find(v);
        if (ru != rv) {
          const bool u_older = is_older(data, ru, rv);
          const std::size_t older = u_older ? ru : rv;
          const std::size_t younger = u_older ? rv : ru;
          full.attach(younger, older);
          // The first attachment of v is a regular vertex joining an existing
          // component, not a class dying.
          if (!v_attached) {
            v_attached = true;
          } else if (!cut) {
            pd.dots.push_back({data[younger], level, younger});
          }
        }
      }

      if (cut) {
        const std::size_t cu = cut->find(u), cv = cut->find(v);
        if (cu == cv) return;
        const bool u_older = is_older(data, cu, cv);
        const std::size_t older = u_older ? cu : cv;
        const std::size_t younger = u_older ? cv : cu;
        if (!v_attached_cut) {
          // v is always the younger here: every earlier root has a higher
          // value or the same value and a smaller index.
          cut->attach(younger, older);
          v_attached_cut = true;
          return;
        }
        const PersistenceDot dot{data[younger], level, younger};
        if (dot.persistence() <= theta) cut->attach(younger, older);
        pd.dots.push_back(dot);
      }
    });
  }

  for (std::size_t k = 0; k < graph.size(); ++k) {
    const std::size_t v = graph.vertex_ids[k];
    if (full.find(v) == v) pd.essentials.push_back({data[v], v});
  }
}

}  // namespace

ForegroundGraph build_filtration_order(const Volume& vol, double mask_eps, Exec exec) {
  if (!(mask_eps >= 0.0 && mask_eps < 1.0)) throw InvalidArgument("mask_eps must lie in [0, 1)");
  require_indexable(vol);
  const std::vector<std::uint64_t> keys =
      exec == Exec::parallel ? gather_keys_parallel(vol, mask_eps) : gather_keys_serial(vol, mask_eps);
  ForegroundGraph g;
  g.dims = vol.dims;
  g.vertex_ids.resize(keys.size());
  g.vertex_values.resize(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    g.vertex_ids[k] = key_index(keys[k]);
    g.vertex_values[k] = vol.data[g.vertex_ids[k]];
  }
  return g;
}

PCountResult pcount_merge(const Volume& vol, double theta, double mask_eps, Exec exec) {
  if (!(theta >= 0.0)) throw InvalidArgument("theta must be >= 0");
  const ForegroundGraph graph = build_filtration_order(vol, mask_eps, exec);
  MergeForest full(vol.data.size());
  MergeForest cut(vol.data.size());
  PCountResult result;
  sweep(vol, graph, full, &cut, theta, result.diagram);

  result.labels.assign(vol.data.size(), 0);
  for (std::size_t v : graph.vertex_ids) {
    const std::size_t root = cut.find(v);
    if (root == v) ++result.count;
    result.labels[v] = static_cast<std::uint32_t>(root + 1);
  }
  return result;
}

PersistenceDiagram compute_persistence(const Volume& vol, double mask_eps, Exec exec) {
  const ForegroundGraph graph = build_filtration_order(vol, mask_eps, exec);
  MergeForest full(vol.data.size());
  PersistenceDiagram pd;
  sweep(vol, graph, full, nullptr, 0.0, pd);
  return pd;
}

}  // namespace pcount
