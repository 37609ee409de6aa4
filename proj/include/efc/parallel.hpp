#pragma once

namespace efc {

/// Kernels with a data-parallel OpenMP path keep a serial reference path
/// that must produce bit-identical results.
enum class Execution { Parallel, Serial };

}  // namespace efc

namespace efc::parallel {

/// Upper bound on OpenMP threads used by the kernels. Initialised from the
/// EFC_THREADS environment variable when set, otherwise the OpenMP default.
int max_threads();
void set_max_threads(int threads);

/// Reads EFC_THREADS and applies it; returns the resulting cap.
int init_from_env();

}  // namespace efc::parallel
