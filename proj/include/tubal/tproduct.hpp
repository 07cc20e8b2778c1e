#pragma once

#include <cstddef>
#include <functional>

#include "tubal/cube.hpp"

// Tensor-tensor product algebra. Every operation maps its operands to the
// Fourier domain along the tubes, works slice by slice, and maps back.
namespace tubal {

/// Unnormalized DFT of every tube x(i, j, :).
SpectralCube dft_tubes(const Cube& x);

/// Inverse of dft_tubes (carries the 1/n3 factor). Throws SymmetryViolation
/// when the result would have an imaginary part above 1e-6 * max|xf|.
Cube idft_tubes(const SpectralCube& xf);

/// t-product of an n1 x n2 x n3 and an n2 x l x n3 cube.
Cube tprod(const Cube& a, const Cube& b);

/// Conjugate transpose: slice 0 transposed, slices 1..n3-1 transposed in reverse order.
Cube ttranspose(const Cube& a);

/// n x n x n3 cube whose first frontal slice is the identity and the rest zero.
Cube identity_tensor(std::size_t n, std::size_t n3);

/// Inverse under the t-product. Throws SingularSlice when a Fourier slice has
/// condition estimate above max_condition().
Cube tinverse(const Cube& a);

/// 1 / (100 * machine epsilon).
double max_condition();

namespace spectral {

/// True for the Fourier slices that equal their own conjugate mirror (DC, and
/// Nyquist for even n3). Their contents are real for real inputs.
inline bool self_conjugate(std::size_t k, std::size_t n3) { return k == 0 || 2 * k == n3; }

/// Runs fn(k) for every independent slice k < n3/2 + 1.
void for_each_independent(std::size_t n3, const std::function<void(std::size_t)>& fn);

/// Slice-wise product a(k) * b(k); mirrored slices are filled by conjugation.
SpectralCube product(const SpectralCube& a, const SpectralCube& b);

/// Slice-wise product a(k)^H * b(k).
SpectralCube adjoint_product(const SpectralCube& a, const SpectralCube& b);

/// Slice-wise conjugate transpose.
SpectralCube adjoint(const SpectralCube& a);

/// 2-norm condition number sigma_max / sigma_min of a square slice;
/// infinite for singular or zero matrices.
double condition_number(const Eigen::Ref<const ComplexRowMatrix>& m);

} // namespace spectral

} // namespace tubal
