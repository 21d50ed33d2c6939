#pragma once

// Internal to the loaders.

#include <cmath>
#include <string>
#include <vector>

#include "pcount/error.hpp"
#include "pcount/volume_io.hpp"

namespace pcount::detail {

// Range-checks raw (already rescaled) values and clamps them to [0, 1].
inline std::vector<float> to_probabilities(const std::vector<double>& raw, const std::string& source) {
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = raw[i];
    if (!std::isfinite(v))
      throw FormatError(source + ": non-finite value at voxel " + std::to_string(i));
    if (v < -kProbabilitySlack || v > 1.0 + kProbabilitySlack)
      throw FormatError(source + ": value " + std::to_string(v) + " at voxel " +
                        std::to_string(i) + " is not a probability");
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    out[i] = static_cast<float>(v);
  }
  return out;
}

}  // namespace pcount::detail
