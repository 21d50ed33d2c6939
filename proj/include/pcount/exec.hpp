#pragma once

namespace pcount {

// Selects between the OpenMP kernel and its serial reference. Both produce
// identical results; the serial path exists for testing and benchmarking.
enum class Exec { serial, parallel };

// Caps the OpenMP team size used by parallel kernels; n <= 0 restores the
// runtime default.
void set_max_threads(int n);

}  // namespace pcount
