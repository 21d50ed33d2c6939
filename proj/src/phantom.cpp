#include "pcount/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "pcount/error.hpp"
#include "pcount/volume_io.hpp"

namespace pcount::oracle {
namespace {

constexpr int kPlacementTries = 20000;

// Hand-rolled draws on top of mt19937_64: the standard distributions are
// implementation-defined, and phantoms must be identical everywhere.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void check_spec(const PhantomSpec& spec) {
  if (spec.dims.size() == 0) throw InvalidArgument("phantom dims must be positive");
  if (spec.n_lesions < 0 || spec.noise_speckles < 0) throw InvalidArgument("phantom counts must be >= 0");
  if (!(spec.radius_min > 0.0) || spec.radius_max < spec.radius_min)
    throw InvalidArgument("phantom radius range must satisfy 0 < min <= max");
  if (!(spec.noise_amplitude >= 0.0 && spec.noise_amplitude <= 1.0))
    throw InvalidArgument("noise amplitude must lie in [0, 1]");
  if (!(spec.background >= 0.0 && spec.background < 0.7))
    throw InvalidArgument("background must lie in [0, 0.7)");
}

std::vector<Lesion> place_lesions(const PhantomSpec& spec, int n, std::mt19937_64& rng) {
  std::vector<Lesion> placed;
  for (int k = 0; k < n; ++k) {
    bool ok = false;
    for (int attempt = 0; attempt < kPlacementTries && !ok; ++attempt) {
      Lesion cand;
      cand.radius = spec.radius_min + (spec.radius_max - spec.radius_min) * uniform01(rng);
      cand.center = {uniform_index(rng, spec.dims.nx), uniform_index(rng, spec.dims.ny),
                     uniform_index(rng, spec.dims.nz)};
      ok = std::all_of(placed.begin(), placed.end(), [&](const Lesion& other) {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double diff = static_cast<double>(cand.center[a]) - static_cast<double>(other.center[a]);
          d2 += diff * diff;
        }
        const double gap = cand.radius + other.radius + 2.0;
        return d2 >= gap * gap;
      });
      if (ok) {
        cand.peak = 0.7 + 0.3 * uniform01(rng);
        placed.push_back(cand);
      }
    }
    if (!ok)
      throw InvalidArgument("could not place lesion " + std::to_string(k + 1) + " of " + std::to_string(n) +
                            " without overlap");
  }
  return placed;
}

void paint_lesion(Volume& vol, const Lesion& lesion) {
  const auto r = static_cast<std::int64_t>(std::ceil(lesion.radius));
  const std::array<std::size_t, 3> extent{vol.dims.nx, vol.dims.ny, vol.dims.nz};
  std::array<std::int64_t, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(lesion.center[a]) - r);
    hi[a] = std::min<std::int64_t>(static_cast<std::int64_t>(extent[a]) - 1,
                                   static_cast<std::int64_t>(lesion.center[a]) + r);
  }
  for (std::int64_t z = lo[2]; z <= hi[2]; ++z)
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
      for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
        const double dx = static_cast<double>(x) - static_cast<double>(lesion.center[0]);
        const double dy = static_cast<double>(y) - static_cast<double>(lesion.center[1]);
        const double dz = static_cast<double>(z) - static_cast<double>(lesion.center[2]);
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (d >= lesion.radius) continue;
        const double p = lesion.peak * 0.5 * (1.0 + std::cos(std::numbers::pi * d / lesion.radius));
        float& cell = vol.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z));
        cell = std::max(cell, static_cast<float>(p));
      }
}

std::size_t speckle_site(const Volume& vol, const std::vector<Lesion>& lesions, std::mt19937_64& rng) {
  const Dims& d = vol.dims;
  if (lesions.empty()) return uniform_index(rng, d.size());
  const Lesion& host = lesions[uniform_index(rng, lesions.size())];
  const double reach = host.radius + 1.0;
  const auto span = static_cast<std::int64_t>(std::ceil(reach));
  const std::array<std::size_t, 3> extent{d.nx, d.ny, d.nz};
  for (;;) {
    std::array<std::int64_t, 3> p{};
    double d2 = 0.0;
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      const auto off = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(2 * span + 1))) - span;
      p[a] = static_cast<std::int64_t>(host.center[a]) + off;
      d2 += static_cast<double>(off * off);
      inside = inside && p[a] >= 0 && p[a] < static_cast<std::int64_t>(extent[a]);
    }
    if (inside && d2 <= reach * reach)
      return d.index(static_cast<std::size_t>(p[0]), static_cast<std::size_t>(p[1]), static_cast<std::size_t>(p[2]));
  }
}

Volume render(const PhantomSpec& spec, const std::vector<Lesion>& lesions, std::mt19937_64& rng) {
  Volume vol(spec.dims, spec.voxel_size_mm, static_cast<float>(spec.background));
  for (const Lesion& lesion : lesions) paint_lesion(vol, lesion);
  for (int s = 0; s < spec.noise_speckles; ++s) {
    const std::size_t site = speckle_site(vol, lesions, rng);
    const double bump = spec.noise_amplitude * (1.0 - uniform01(rng));  // (0, amplitude]
    vol.data[site] = static_cast<float>(std::min(1.0, static_cast<double>(vol.data[site]) + bump));
  }
  return vol;
}

}  // namespace

Phantom generate_phantom(const PhantomSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  Phantom ph;
  ph.lesions = place_lesions(spec, spec.n_lesions, rng);
  ph.volume = render(spec, ph.lesions, rng);
  ph.true_count = spec.n_lesions;
  return ph;
}

LongitudinalManifest generate_longitudinal(const LongitudinalSpec& spec, const std::filesystem::path& out_dir) {
  if (spec.n_subjects < 1) throw InvalidArgument("need at least one subject");
  if (spec.timepoints < 2) throw InvalidArgument("need at least two timepoints");
  if (!spec.schedule.empty()) {
    if (spec.schedule.size() != static_cast<std::size_t>(spec.timepoints))
      throw InvalidArgument("schedule length must equal the number of timepoints");
    if (!std::is_sorted(spec.schedule.begin(), spec.schedule.end()) || spec.schedule.front() < 0)
      throw InvalidArgument("schedule must be non-negative and non-decreasing");
  } else if (spec.lesions_min < 0 || spec.lesions_max < spec.lesions_min) {
    throw InvalidArgument("lesion range must satisfy 0 <= min <= max");
  }
  check_spec(spec.phantom);

  std::filesystem::create_directories(out_dir);
  LongitudinalManifest manifest;
  for (int i = 0; i < spec.n_subjects; ++i) {
    const std::uint64_t subject_seed = splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1));
    std::mt19937_64 rng(subject_seed);

    std::vector<int> schedule = spec.schedule;
    if (schedule.empty()) {
      const auto width = static_cast<std::size_t>(spec.lesions_max - spec.lesions_min + 1);
      for (int t = 0; t < spec.timepoints; ++t)
        schedule.push_back(spec.lesions_min + static_cast<int>(uniform_index(rng, width)));
      std::sort(schedule.begin(), schedule.end());
    }
    const std::vector<Lesion> lesions = place_lesions(spec.phantom, schedule.back(), rng);

    char id[32];
    std::snprintf(id, sizeof id, "sub-%03d", i + 1);
    Subject subject;
    subject.subject_id = id;
    for (int t = 0; t < spec.timepoints; ++t) {
      std::mt19937_64 speckle_rng(splitmix64(subject_seed + static_cast<std::uint64_t>(t) + 1));
      const std::vector<Lesion> present(lesions.begin(), lesions.begin() + schedule[t]);
      const Volume vol = render(spec.phantom, present, speckle_rng);
      char name[64];
      std::snprintf(name, sizeof name, "%s_tp-%02d.json", id, t + 1);
      write_raw_json(vol, out_dir / name);
      subject.timepoints.push_back({t + 1, name, schedule[t]});
    }
    manifest.subjects.push_back(std::move(subject));
  }
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace pcount::oracle
