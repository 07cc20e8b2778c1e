#pragma once

#include <complex>

#include "tubal/cube.hpp"

// Batched DFTs along the tube (mode-3) axis, backed by FFTW.
namespace tubal::fft {

/// Unnormalized forward DFT of every tube. Writes the first n3/2+1 slices of `out`.
void forward_tubes(const double* in, std::complex<double>* out, const Dims& dims);

/// Inverse DFT (1/n3 scaled) of a conjugate-symmetric cube given by its first
/// n3/2+1 slices.
void inverse_tubes_real(const std::complex<double>* in, double* out, const Dims& dims);

/// Full complex inverse DFT (1/n3 scaled) of all n3 slices.
void inverse_tubes_complex(const std::complex<double>* in, std::complex<double>* out,
                           const Dims& dims);

} // namespace tubal::fft
