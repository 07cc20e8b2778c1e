#pragma once

#include <cstdint>
#include <random>

namespace tubal {

struct RngSeed {
    std::uint64_t seed = 0;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Deterministic child seed for stream `index` of `parent` (splitmix64 finalizer).
RngSeed derive_seed(RngSeed parent, std::uint64_t index);

inline std::mt19937_64 make_engine(RngSeed seed) { return std::mt19937_64(seed.seed); }

} // namespace tubal
