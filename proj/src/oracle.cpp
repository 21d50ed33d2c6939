#include "pcount/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

namespace pcount::oracle {

std::vector<std::int64_t> flood_fill_labels(const Volume& vol, float level, double mask_eps) {
  const auto inside = [&](std::size_t i) {
    return vol.data[i] >= level && static_cast<double>(vol.data[i]) > mask_eps;
  };
  std::vector<std::int64_t> label(vol.data.size(), -1);
  std::queue<std::size_t> frontier;
  // Seeds are visited in ascending index order, so the seed of each
  // component is its smallest index.
  for (std::size_t seed = 0; seed < vol.data.size(); ++seed) {
    if (label[seed] >= 0 || !inside(seed)) continue;
    const auto id = static_cast<std::int64_t>(seed);
    label[seed] = id;
    frontier.push(seed);
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for_each_face_neighbor(vol.dims, v, [&](std::size_t u) {
        if (label[u] < 0 && inside(u)) {
          label[u] = id;
          frontier.push(u);
        }
      });
    }
  }
  return label;
}

std::set<std::size_t> brute_force_components(const Volume& vol, double tau) {
  std::set<std::size_t> ids;
  for (std::int64_t l : flood_fill_labels(vol, static_cast<float>(tau), -1.0))
    if (l >= 0) ids.insert(static_cast<std::size_t>(l));
  return ids;
}

namespace {

std::vector<float> distinct_levels(const Volume& vol, double mask_eps) {
  std::vector<float> levels;
  for (float v : vol.data)
    if (static_cast<double>(v) > mask_eps) levels.push_back(v);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

}  // namespace

LevelSweepTrace level_sweep_trace(const Volume& vol, double mask_eps) {
  LevelSweepTrace trace;
  trace.levels = distinct_levels(vol, mask_eps);
  for (float level : trace.levels) {
    auto labels = flood_fill_labels(vol, level, mask_eps);
    std::set<std::size_t> ids;
    for (std::int64_t l : labels)
      if (l >= 0) ids.insert(static_cast<std::size_t>(l));
    trace.labels_at_level.push_back(std::move(labels));
    trace.components_at_level.push_back(std::move(ids));
  }
  return trace;
}

bool is_nested(const LevelSweepTrace& trace) {
  for (std::size_t k = 0; k + 1 < trace.levels.size(); ++k) {
    const auto& upper = trace.labels_at_level[k];
    const auto& lower = trace.labels_at_level[k + 1];
    std::map<std::int64_t, std::int64_t> image;
    for (std::size_t v = 0; v < upper.size(); ++v) {
      if (upper[v] < 0) continue;
      if (lower[v] < 0) return false;
      const auto [it, fresh] = image.emplace(upper[v], lower[v]);
      if (!fresh && it->second != lower[v]) return false;
    }
  }
  return true;
}

PersistenceDiagram brute_force_diagram(const Volume& vol, double mask_eps) {
  struct Class {
    float birth;
    std::size_t vertex;
    bool alive;
  };
  std::vector<Class> classes;
  PersistenceDiagram pd;

  for (float level : distinct_levels(vol, mask_eps)) {
    const auto labels = flood_fill_labels(vol, level, mask_eps);
    std::map<std::int64_t, std::vector<std::size_t>> members;
    for (std::size_t c = 0; c < classes.size(); ++c)
      if (classes[c].alive) members[labels[classes[c].vertex]].push_back(c);

    std::set<std::int64_t> regions(labels.begin(), labels.end());
    regions.erase(-1);
    for (std::int64_t region : regions) {
      auto it = members.find(region);
      if (it == members.end()) {
        // Nothing alive here yet: every voxel of the region sits exactly at
        // this level, and the region's id is its smallest index.
        classes.push_back({level, static_cast<std::size_t>(region), true});
        continue;
      }
      auto& group = it->second;
      if (group.size() < 2) continue;
      std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
        if (classes[a].birth != classes[b].birth) return classes[a].birth > classes[b].birth;
        return classes[a].vertex < classes[b].vertex;
      });
      for (std::size_t k = 1; k < group.size(); ++k) {
        Class& dying = classes[group[k]];
        dying.alive = false;
        pd.dots.push_back({dying.birth, level, dying.vertex});
      }
    }
  }
  for (const Class& c : classes)
    if (c.alive) pd.essentials.push_back({c.birth, c.vertex});
  return pd;
}

}  // namespace pcount::oracle
