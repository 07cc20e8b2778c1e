#pragma once

#include <cstddef>

#include "tubal/cube.hpp"
#include "tubal/random.hpp"

// Tensor bilateral random projections (t-BRP) and the tubal-rank-r
// approximation L = Y1 * (A2^T * Y1)^-1 * Y2^T built from them.
namespace tubal {

/// Y1 = X * A1 and Y2 = X^T * A2 for the cube X the sketch was drawn from.
struct BrpSketch {
    Cube y1;                     ///< n1 x r x n3
    Cube y2;                     ///< n2 x r x n3
    Cube a1;                     ///< n2 x r x n3
    Cube a2;                     ///< n1 x r x n3
    std::size_t effective_r = 0; ///< <= requested r
};

struct BrpOptions {
    /// Shrink-and-redraw rounds allowed after the first sketch.
    std::size_t max_restarts = 3;
};

struct LowRankApprox {
    Cube l;
    std::size_t effective_r = 0;
    std::size_t restarts = 0;
    bool used_pseudo_inverse = false;
};

/// i.i.d. standard normal entries, deterministic in `seed`.
Cube gaussian_cube(std::size_t n1, std::size_t n2, std::size_t n3, RngSeed seed);

/// Draws A1, forms Y1 = X * A1, sets A2 = Y1 and forms Y2 = X^T * A2.
BrpSketch brp_sketch(const Cube& x, std::size_t r, RngSeed seed);

/// Tubal rank of the r x r tensor A2^T * Y2. That product only conforms for
/// square slices (n1 == n2); otherwise A1^T * Y2 = (X A1)^T (X A1) is used.
std::size_t brp_rank_check(const BrpSketch& sketch, double tol = 0.0);

/// Y1 * (A2^T * Y1)^-1 * Y2^T, solved per Fourier slice. Throws SingularGram
/// when a Gram slice has condition estimate above max_condition().
Cube brp_approx(const BrpSketch& sketch);

/// Sketch, check the detected rank, shrink r and redraw A1 while the rank is
/// deficient, then approximate. A detected rank of 0 yields the zero cube.
LowRankApprox low_tubal_rank_approx(const Cube& x, std::size_t r, RngSeed seed,
                                    double tol = 0.0, const BrpOptions& options = {});

} // namespace tubal
