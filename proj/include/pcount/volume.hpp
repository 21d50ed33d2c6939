#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pcount {

// Grid extent. Linear index of (x, y, z) is x + nx * (y + ny * z).
struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  constexpr std::size_t size() const noexcept { return nx * ny * nz; }
  constexpr std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + nx * (y + ny * z);
  }
  constexpr std::array<std::size_t, 3> coords(std::size_t i) const noexcept {
    return {i % nx, (i / nx) % ny, i / (nx * ny)};
  }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

// A 3D field of lesion probabilities. Values are finite and lie in [0, 1].
struct Volume {
  Dims dims;
  std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};
  std::vector<float> data;

  Volume() = default;
  Volume(Dims d, std::array<double, 3> voxel_size, float fill = 0.0f)
      : dims(d), voxel_size_mm(voxel_size), data(d.size(), fill) {}

  float& at(std::size_t x, std::size_t y, std::size_t z) { return data[dims.index(x, y, z)]; }
  float at(std::size_t x, std::size_t y, std::size_t z) const { return data[dims.index(x, y, z)]; }
};

// Throws FormatError unless dims match the data length and every value is a
// finite probability.
void validate(const Volume& vol);

// Calls fn(neighbor_index) for each of the up to six face neighbors of voxel i,
// in the fixed order -x, +x, -y, +y, -z, +z.
template <class Fn>
inline void for_each_face_neighbor(const Dims& d, std::size_t i, Fn&& fn) {
  const std::size_t x = i % d.nx;
  const std::size_t y = (i / d.nx) % d.ny;
  const std::size_t z = i / (d.nx * d.ny);
  const std::size_t sy = d.nx;
  const std::size_t sz = d.nx * d.ny;
  if (x > 0) fn(i - 1);
  if (x + 1 < d.nx) fn(i + 1);
  if (y > 0) fn(i - sy);
  if (y + 1 < d.ny) fn(i + sy);
  if (z > 0) fn(i - sz);
  if (z + 1 < d.nz) fn(i + sz);
}

}  // namespace pcount
