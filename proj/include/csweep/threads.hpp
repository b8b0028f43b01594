#pragma once

namespace csweep {

// Caps the number of OpenMP threads used by parallel kernels. Values < 1 are
// ignored. Results are bit-identical for any setting.
void set_max_threads(int count);
int max_threads();

}  // namespace csweep
