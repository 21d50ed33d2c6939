#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <utility>

#include "pcount/exec.hpp"
#include "pcount/volume.hpp"

namespace pcount {

enum class SourceFormat { nifti1, raw_json };

struct VolumeHeaderInfo {
  SourceFormat source_format = SourceFormat::raw_json;
  std::array<std::size_t, 3> original_dims{0, 0, 0};
  // (slope, intercept) when the on-disk values were rescaled at load.
  std::optional<std::pair<double, double>> scale_applied;
};

// Loaded values outside [-kProbabilitySlack, 1 + kProbabilitySlack] reject the
// file; values inside that band are clamped to [0, 1].
inline constexpr double kProbabilitySlack = 0.01;

// Reads a NIfTI-1 single file (.nii) or header/image pair (.hdr/.img), gzip
// compressed or not. Supported datatypes: uint8, int16, int32, float32,
// float64. Only 3D data (or 4D with a single frame) is accepted.
Volume load_nifti(const std::filesystem::path& path, VolumeHeaderInfo* header = nullptr);

// Reads the sidecar-JSON fixture format:
//   {"dims":[nx,ny,nz], "voxel_size_mm":[a,b,c], "data_file":"x.raw",
//    "dtype":"float32", "byte_order":"little"}
// data_file is resolved relative to the JSON file.
Volume load_raw_json(const std::filesystem::path& path, VolumeHeaderInfo* header = nullptr);

// Writes json_path plus a little-endian float32 blob named after its stem.
void write_raw_json(const Volume& vol, const std::filesystem::path& json_path);

// Dispatches on extension: .json -> raw_json, anything else -> NIfTI.
Volume load_volume(const std::filesystem::path& path, VolumeHeaderInfo* header = nullptr);

// Bounding box of voxels with p > eps, grown by one voxel and clipped to the
// grid. An empty foreground yields a 1x1x1 zero volume.
Volume crop_to_foreground(const Volume& vol, double eps);

// Block-mean pooling over factor^3 blocks; trailing partial blocks average the
// voxels that exist. Output dims are ceil(dims / factor).
Volume downsample(const Volume& vol, std::size_t factor, Exec exec = Exec::parallel);

}  // namespace pcount
