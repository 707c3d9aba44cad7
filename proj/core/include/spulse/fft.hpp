#pragma once

#include "spulse/grid.hpp"

#include <cstddef>

// Thin wrappers over cached FFTW plans. All transforms are unnormalized and
// out-of-place; plans are created once per (kind, size) under a lock and the
// execute calls are safe from any thread.
namespace spulse::fft {

/// out_k = sum_j in_j e^{-2 pi i jk/n}
void forward(const cplx* in, cplx* out, std::size_t n);
/// out_j = sum_k in_k e^{+2 pi i jk/n}
void backward(const cplx* in, cplx* out, std::size_t n);
/// Real-to-half-complex forward transform; out holds n/2+1 values.
void r2c(const double* in, cplx* out, std::size_t n);
/// Half-complex-to-real backward transform; overwrites `in`.
void c2r(cplx* in, double* out, std::size_t n);

} // namespace spulse::fft
