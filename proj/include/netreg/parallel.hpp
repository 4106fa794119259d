#pragma once

namespace netreg {

/// Caps the number of threads used by library kernels (0 restores the
/// OpenMP default). Results never depend on this setting.
void set_num_threads(int threads);

int max_threads();

}  // namespace netreg
