#pragma once

#include <cstddef>
#include <vector>

#include "tubal/cube.hpp"

namespace tubal {

/// x = u * s * v^T under the t-product.
struct TsvdFactors {
    Cube u; ///< n1 x n1 x n3, t-orthogonal
    Cube s; ///< n1 x n2 x n3, f-diagonal
    Cube v; ///< n2 x n2 x n3, t-orthogonal
};

/// Ranks of the Fourier-domain frontal slices.
struct MultiRank {
    std::vector<std::size_t> ranks;
    double tolerance = 0.0; ///< 0 when the per-slice automatic threshold was used
};

/// Full t-SVD. Singular values are non-increasing within every Fourier slice.
TsvdFactors tsvd(const Cube& x);

/// Singular values of every Fourier slice (all n3 slices, each non-increasing).
std::vector<Eigen::VectorXd> fourier_singular_values(const Cube& x);
std::vector<Eigen::VectorXd> fourier_singular_values(const SpectralCube& xf);

/// Numerical rank of every Fourier slice. tol = 0 selects the automatic
/// threshold max(n1, n2) * eps * sigma_max(slice); otherwise tol is absolute.
MultiRank multi_rank(const Cube& x, double tol = 0.0);

/// multi_rank of the real cube whose transform is `xf` (conjugate symmetric).
MultiRank multi_rank(const SpectralCube& xf, double tol = 0.0);

/// max over multi_rank(x, tol).ranks.
std::size_t tubal_rank(const Cube& x, double tol = 0.0);
std::size_t tubal_rank(const SpectralCube& xf, double tol = 0.0);

/// Tensor nuclear norm: sum of singular values over all Fourier slices.
double tnn(const Cube& x);

/// Best tubal-rank-r approximation: keeps the r leading singular triplets of
/// every Fourier slice. Throws RankOutOfRange unless 1 <= r <= min(n1, n2).
Cube truncated_tsvd(const Cube& x, std::size_t r);

/// Applies the automatic or absolute rank rule to one sorted singular-value vector.
std::size_t numerical_rank(const Eigen::VectorXd& sigma, std::size_t rows, std::size_t cols,
                           double tol);

} // namespace tubal
