#include "pcount/counting.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <ostream>
#include <string>

#include "pcount/error.hpp"
#include "pcount/filtration.hpp"
#include "pcount/grid.hpp"

namespace pcount {
namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t v) {
  std::int32_t root = v;
  while (parent[root] != root) root = parent[root];
  while (parent[v] != root) {
    const std::int32_t next = parent[v];
    parent[v] = root;
    v = next;
  }
  return root;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  return m == Method::persistence ? "persistence" : "direct_threshold";
}

Method parse_method(std::string_view text) {
  if (text == "persistence") return Method::persistence;
  if (text == "threshold" || text == "direct_threshold") return Method::direct_threshold;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

std::size_t direct_threshold_count(const Volume& vol, double tau) {
  if (vol.data.size() != vol.dims.size()) throw InvalidArgument("volume dims do not match data length");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in (0, 1]");
  const float level = static_cast<float>(tau);
  const Dims& d = vol.dims;
  const std::size_t sy = d.nx, sz = d.nx * d.ny;
  std::vector<std::int32_t> parent(vol.data.size(), -1);
  std::size_t components = 0;
  // Raster scan: each voxel links to its already-visited -x, -y, -z neighbors.
  for (std::size_t z = 0, i = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x, ++i) {
        if (!(vol.data[i] >= level)) continue;
        parent[i] = static_cast<std::int32_t>(i);
        ++components;
        auto link = [&](std::size_t j) {
          if (parent[j] < 0) return;
          const std::int32_t a = find_root(parent, static_cast<std::int32_t>(i));
          const std::int32_t b = find_root(parent, static_cast<std::int32_t>(j));
          if (a == b) return;
          parent[std::max(a, b)] = std::min(a, b);
          --components;
        };
        if (x > 0) link(i - 1);
        if (y > 0) link(i - sy);
        if (z > 0) link(i - sz);
      }
  return components;
}

SweepResult sweep_direct(const Volume& vol, const std::vector<double>& taus, Exec exec) {
  require_increasing(taus, "threshold");
  SweepResult r;
  r.method = Method::direct_threshold;
  r.thresholds = taus;
  r.counts.assign(taus.size(), 0);
  const auto n = static_cast<std::int64_t>(taus.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k) r.counts[k] = direct_threshold_count(vol, taus[k]);
  } else {
    for (std::int64_t k = 0; k < n; ++k) r.counts[k] = direct_threshold_count(vol, taus[k]);
  }
  return r;
}

SweepResult sweep_persistence(const PersistenceDiagram& pd, const std::vector<double>& thetas) {
  require_increasing(thetas, "persistence");
  if (thetas.front() < 0.0) throw InvalidArgument("persistence thresholds must be >= 0");
  SweepResult r;
  r.method = Method::persistence;
  r.thresholds = thetas;
  r.counts.reserve(thetas.size());
  for (double theta : thetas) r.counts.push_back(count_from_diagram(pd, theta));
  return r;
}

SweepResult sweep_persistence(const Volume& vol, const std::vector<double>& thetas, double mask_eps,
                              Exec exec) {
  return sweep_persistence(compute_persistence(vol, mask_eps, exec), thetas);
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "method,threshold,count\n";
  char line[96];
  const std::string method(to_string(sweep.method));
  for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
    std::snprintf(line, sizeof line, ",%.6f,%zu\n", sweep.thresholds[k], sweep.counts[k]);
    os << method << line;
  }
}

}  // namespace pcount
