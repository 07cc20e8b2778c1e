#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "tubal/cube.hpp"
#include "tubal/random.hpp"

// Synthetic corruption of hyperspectral cubes: Gaussian noise, salt-and-pepper
// impulses, stripes (constant column offsets) and deadlines (zeroed columns).
namespace tubal {

struct IntRange {
    int lo = 1;
    int hi = 1;

    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const RealRange&, const RealRange&) = default;
};

struct NoiseSpec {
    double gaussian_sigma = 0.0;   ///< standard deviation
    double impulse_fraction = 0.0; ///< share of all entries hit by salt-and-pepper
    std::size_t stripe_bands = 0;
    IntRange stripe_width_range{1, 3};
    std::size_t deadline_bands = 0;
    IntRange deadline_width_range{1, 3};
    IntRange groups_per_band{1, 3};
    RealRange stripe_amplitude{0.2, 0.5}; ///< |offset|; sign is random
    RngSeed seed{0};

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Case 1: sigma 0.04 Gaussian plus 20% salt-and-pepper.
NoiseSpec case1_spec(RngSeed seed);
/// Case 2: sigma 0.02 Gaussian, 20% salt-and-pepper, stripes and deadlines on
/// 10 bands with widths of one to three lines.
NoiseSpec case2_spec(RngSeed seed);

/// Maps every band affinely onto [0, 1]; constant bands become zero.
Cube normalize_bandwise(const Cube& x);

Cube add_gaussian(const Cube& x, double sigma, RngSeed seed);

struct Corrupted {
    Cube cube;
    Cube mask; ///< 1 where an entry was altered, 0 elsewhere
};

/// Sets exactly round(fraction * size) distinct entries to 0 or 1 (equal odds).
Corrupted add_impulse(const Cube& x, double fraction, RngSeed seed);

/// Adds stripes and deadlines. Stripe bands and deadline bands are drawn from
/// one random band ordering, so equal counts hit the same bands.
/// Throws SpecExceedsDims when band counts exceed n3 or widths exceed n2.
Corrupted add_stripes_deadlines(const Cube& x, const NoiseSpec& spec);

struct Synthesized {
    Cube clean; ///< band-normalized reference (or the input when normalization is off)
    Cube noisy;
    Cube mask;  ///< union of impulse, stripe and deadline masks
};

/// normalize -> impulse -> stripes/deadlines -> Gaussian.
Synthesized synthesize(const Cube& clean, const NoiseSpec& spec, bool normalize = true);

} // namespace tubal
