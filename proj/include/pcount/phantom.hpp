#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pcount/calibration.hpp"
#include "pcount/volume.hpp"

namespace pcount::oracle {

struct PhantomSpec {
  Dims dims{32, 32, 32};
  std::array<double, 3> voxel_size_mm{2.0, 2.0, 2.0};
  int n_lesions = 5;
  double radius_min = 2.0;  // voxels
  double radius_max = 4.0;
  int noise_speckles = 0;
  double noise_amplitude = 0.3;
  // Constant probability floor under everything; 0 leaves lesions and speckles
  // on an empty background.
  double background = 0.0;
  std::uint64_t seed = 0;
};

struct Lesion {
  std::array<std::size_t, 3> center;
  double radius = 0.0;
  double peak = 0.0;
};

struct Phantom {
  Volume volume;
  int true_count = 0;
  std::vector<Lesion> lesions;
};

// Lesions are cosine bumps peak * (1 + cos(pi d / r)) / 2 for d < r with peak
// in [0.7, 1.0], centred on voxels at least r1 + r2 + 2 apart, so each one is
// a single 6-connected component at any level up to its peak. Speckles are
// single voxels raised by amplitude * U(0, 1]; they land within one voxel of a
// lesion's support (anywhere when there are none). Throws InvalidArgument
// when the lesions cannot be placed.
Phantom generate_phantom(const PhantomSpec& spec);

struct LongitudinalSpec {
  int n_subjects = 5;
  int timepoints = 4;
  // Either an explicit per-timepoint lesion count applied to every subject...
  std::vector<int> schedule;
  // ...or, when empty, a random non-decreasing schedule within these bounds.
  int lesions_min = 5;
  int lesions_max = 20;
  PhantomSpec phantom;  // n_lesions and seed are ignored
  std::uint64_t seed = 0;
};

// Writes sub-NNN_tp-TT.json/.raw volumes plus manifest.json into out_dir and
// returns the manifest (with paths relative to out_dir). Lesions persist
// across timepoints; new ones appear as the schedule grows. Speckles are
// redrawn at every timepoint.
LongitudinalManifest generate_longitudinal(const LongitudinalSpec& spec,
                                           const std::filesystem::path& out_dir);

}  // namespace pcount::oracle
