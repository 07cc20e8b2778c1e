#pragma once

#include <cstddef>
#include <vector>

#include "tubal/brp.hpp"
#include "tubal/cube.hpp"
#include "tubal/random.hpp"

namespace tubal {

/// Parameters of the constrained recovery
///   min ||X - L - S||_F^2  s.t.  tubal_rank(L) <= r,  card(S) <= k.
struct DenoiseConfig {
    std::size_t r = 5;
    std::size_t k = 0;
    double eps = 1e-6;            ///< stop once ||X-L-S||^2 / ||X||^2 <= eps
    std::size_t max_iter = 100;
    RngSeed seed{0};
    double rank_tol = 0.0;        ///< 0 = automatic per-slice threshold
    std::size_t divergence_window = 5;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
};

struct DenoiseResult {
    Cube l; ///< low-tubal-rank estimate
    Cube s; ///< sparse estimate
    std::size_t iterations = 0;
    std::vector<double> residual_history;
    std::vector<std::size_t> effective_rank_history;
    double elapsed_seconds = 0.0;
    /// Set when the run stopped because the residual rose divergence_window
    /// times in a row; (l, s) are then the best iterate seen.
    bool diverged = false;
    std::size_t best_iteration = 0;

    [[nodiscard]] double final_residual() const {
        return residual_history.empty() ? 1.0 : residual_history.back();
    }
};

/// Keeps the k entries of largest magnitude (ties broken towards the lower
/// linear index) and zeroes the rest.
Cube hard_threshold(const Cube& x, std::size_t k);

/// ||x - l - s||_F^2.
double objective(const Cube& x, const Cube& l, const Cube& s);

/// Alternates L = t-BRP approximation of (X - S) and S = hard_threshold(X - L, k)
/// until the relative squared residual drops to eps or max_iter is reached.
DenoiseResult denoise(const Cube& x, const DenoiseConfig& cfg);

} // namespace tubal
