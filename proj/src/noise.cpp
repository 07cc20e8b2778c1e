#include "tubal/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "tubal/errors.hpp"

namespace tubal {

namespace {

void check_range(const IntRange& r, const char* name) {
    if (r.lo < 1 || r.hi < r.lo) {
        throw InvalidArgument(std::string(name) + " must satisfy 1 <= lo <= hi");
    }
}

// First `count` entries of a uniformly random permutation of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::mt19937_64& engine) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(engine)]);
    }
    idx.resize(count);
    return idx;
}

int draw(std::mt19937_64& engine, const IntRange& r) {
    return std::uniform_int_distribution<int>(r.lo, r.hi)(engine);
}

} // namespace

void NoiseSpec::validate() const {
    if (!(gaussian_sigma >= 0.0)) throw InvalidArgument("gaussian_sigma must be >= 0");
    if (!(impulse_fraction >= 0.0 && impulse_fraction <= 1.0)) {
        throw InvalidArgument("impulse_fraction must lie in [0, 1]");
    }
    check_range(stripe_width_range, "stripe_width_range");
    check_range(deadline_width_range, "deadline_width_range");
    check_range(groups_per_band, "groups_per_band");
    if (!(stripe_amplitude.lo >= 0.0 && stripe_amplitude.hi >= stripe_amplitude.lo)) {
        throw InvalidArgument("stripe_amplitude must satisfy 0 <= lo <= hi");
    }
}

NoiseSpec case1_spec(RngSeed seed) {
    NoiseSpec s;
    s.gaussian_sigma = 0.04;
    s.impulse_fraction = 0.2;
    s.seed = seed;
    return s;
}

NoiseSpec case2_spec(RngSeed seed) {
    NoiseSpec s;
    s.gaussian_sigma = 0.02;
    s.impulse_fraction = 0.2;
    s.stripe_bands = 10;
    s.deadline_bands = 10;
    s.stripe_width_range = {1, 3};
    s.deadline_width_range = {1, 3};
    s.seed = seed;
    return s;
}

Cube normalize_bandwise(const Cube& x) {
    Cube out(x.dims());
    for (std::size_t k = 0; k < x.n3(); ++k) {
        const auto band = x.slice(k);
        const double lo = band.minCoeff();
        const double hi = band.maxCoeff();
        if (hi > lo) {
            out.slice(k) = (band.array() - lo) / (hi - lo);
        }
    }
    return out;
}

Cube add_gaussian(const Cube& x, double sigma, RngSeed seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
    Cube out = x;
    if (sigma == 0.0) return out;
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (auto& v : out.data()) v += normal(engine);
    return out;
}

Corrupted add_impulse(const Cube& x, double fraction, RngSeed seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw InvalidArgument("impulse fraction must lie in [0, 1]");
    }
    Corrupted c{x, Cube(x.dims())};
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(x.size())));
    auto engine = make_engine(seed);
    const auto positions = sample_without_replacement(x.size(), count, engine);
    std::bernoulli_distribution salt(0.5);
    auto out = c.cube.data();
    auto mask = c.mask.data();
    for (const std::size_t p : positions) {
        out[p] = salt(engine) ? 1.0 : 0.0;
        mask[p] = 1.0;
    }
    return c;
}

Corrupted add_stripes_deadlines(const Cube& x, const NoiseSpec& spec) {
    spec.validate();
    const std::size_t n1 = x.n1();
    const std::size_t n2 = x.n2();
    const std::size_t n3 = x.n3();
    if (spec.stripe_bands > n3 || spec.deadline_bands > n3) {
        throw SpecExceedsDims("stripe/deadline band count (" + std::to_string(spec.stripe_bands) +
                              "/" + std::to_string(spec.deadline_bands) + ") exceeds n3 = " +
                              std::to_string(n3));
    }
    if ((spec.stripe_bands > 0 && static_cast<std::size_t>(spec.stripe_width_range.hi) > n2) ||
        (spec.deadline_bands > 0 && static_cast<std::size_t>(spec.deadline_width_range.hi) > n2)) {
        throw SpecExceedsDims("stripe/deadline width exceeds n2 = " + std::to_string(n2));
    }

    Corrupted c{x, Cube(x.dims())};
    auto engine = make_engine(spec.seed);
    const auto bands =
        sample_without_replacement(n3, std::max(spec.stripe_bands, spec.deadline_bands), engine);

    const auto place = [&](std::size_t band, const IntRange& widths, auto&& apply) {
        const int groups = draw(engine, spec.groups_per_band);
        for (int g = 0; g < groups; ++g) {
            const auto width = static_cast<std::size_t>(draw(engine, widths));
            const std::size_t start =
                std::uniform_int_distribution<std::size_t>(0, n2 - width)(engine);
            apply(band, start, width);
        }
    };

    for (std::size_t b = 0; b < spec.stripe_bands; ++b) {
        place(bands[b], spec.stripe_width_range, [&](std::size_t band, std::size_t start, std::size_t width) {
            std::uniform_real_distribution<double> amp(spec.stripe_amplitude.lo, spec.stripe_amplitude.hi);
            const double offset = std::bernoulli_distribution(0.5)(engine) ? amp(engine) : -amp(engine);
            for (std::size_t i = 0; i < n1; ++i) {
                for (std::size_t j = start; j < start + width; ++j) {
                    c.cube(i, j, band) += offset;
                    c.mask(i, j, band) = 1.0;
                }
            }
        });
    }
    for (std::size_t b = 0; b < spec.deadline_bands; ++b) {
        place(bands[b], spec.deadline_width_range, [&](std::size_t band, std::size_t start, std::size_t width) {
            for (std::size_t i = 0; i < n1; ++i) {
                for (std::size_t j = start; j < start + width; ++j) {
                    c.cube(i, j, band) = 0.0;
                    c.mask(i, j, band) = 1.0;
                }
            }
        });
    }
    return c;
}

Synthesized synthesize(const Cube& clean, const NoiseSpec& spec, bool normalize) {
    spec.validate();
    Synthesized out;
    out.clean = normalize ? normalize_bandwise(clean) : clean;

    Corrupted impulse = add_impulse(out.clean, spec.impulse_fraction, derive_seed(spec.seed, 1));
    NoiseSpec structured = spec;
    structured.seed = derive_seed(spec.seed, 2);
    Corrupted lines = add_stripes_deadlines(impulse.cube, structured);

    out.mask = std::move(impulse.mask);
    const auto lm = lines.mask.data();
    auto m = out.mask.data();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], lm[i]);

    out.noisy = add_gaussian(lines.cube, spec.gaussian_sigma, derive_seed(spec.seed, 3));
    return out;
}

} // namespace tubal
