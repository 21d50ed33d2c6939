#include "pcount/volume.hpp"

#include <cmath>
#include <string>

#include <omp.h>

#include "pcount/error.hpp"
#include "pcount/exec.hpp"

namespace pcount {

void validate(const Volume& vol) {
  if (vol.dims.nx == 0 || vol.dims.ny == 0 || vol.dims.nz == 0)
    throw FormatError("volume has an empty dimension");
  if (vol.dims.size() != vol.data.size())
    throw FormatError("volume dims product " + std::to_string(vol.dims.size()) +
                      " does not match data length " + std::to_string(vol.data.size()));
  for (double s : vol.voxel_size_mm)
    if (!(s > 0.0) || !std::isfinite(s)) throw FormatError("voxel size must be positive");
  for (float v : vol.data)
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw FormatError("volume value outside [0, 1]: " + std::to_string(v));
}

void set_max_threads(int n) {
  static const int runtime_default = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : runtime_default);
}

}  // namespace pcount
