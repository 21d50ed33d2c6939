#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pcount/volume.hpp"

namespace pcount::test {

Volume make_volume(Dims dims, std::vector<float> values);

// The 5-voxel strip [0.2, 0.9, 0.3, 0.6, 0.1] laid along x.
Volume strip();

// Random volume with every axis in [1, max_edge] and values k/32, k in
// [0, 32]. Roughly a third of the voxels are zero so foregrounds split.
Volume random_quantized(std::mt19937_64& rng, std::size_t max_edge = 12);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

// Minimal NIfTI-1 writer for loader tests.
struct NiftiSpec {
  std::int16_t dim[8] = {3, 1, 1, 1, 1, 1, 1, 1};
  std::int16_t datatype = 16;
  float pixdim[4] = {1.0f, 1.0f, 1.0f, 1.0f};
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  bool big_endian = false;
  bool gzip = false;
  bool pair = false;             // .hdr/.img instead of a single .nii
  std::int32_t sizeof_hdr = 348;  // override to corrupt
};

// `payload` holds the voxel values in host byte order; it is swapped when
// big_endian is set (element width from the datatype).
void write_nifti(const std::filesystem::path& path, const NiftiSpec& spec, const std::vector<std::uint8_t>& payload);

template <class T>
std::vector<std::uint8_t> bytes_of(const std::vector<T>& v) {
  std::vector<std::uint8_t> out(v.size() * sizeof(T));
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

}  // namespace pcount::test
