#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tubal/bench.hpp"
#include "tubal/brp.hpp"
#include "tubal/denoise.hpp"
#include "tubal/errors.hpp"
#include "tubal/tproduct.hpp"
#include "tubal/tsvd.hpp"

using namespace tubal;
using oracle::random_cube;

namespace {

std::vector<double> values(const Cube& c) { return {c.data().begin(), c.data().end()}; }

struct Planted {
    Cube l0;
    Cube s0;
    Cube x;
};

// Rank-3 Gaussian product plus `spikes` entries of magnitude 10 with random signs.
Planted planted_with_spikes(const Dims& d, std::size_t spikes, std::uint64_t seed) {
    Planted p;
    p.l0 = tprod(gaussian_cube(d.n1, 3, d.n3, RngSeed{seed}),
                 gaussian_cube(3, d.n2, d.n3, RngSeed{seed + 1}));
    p.s0 = Cube(d);
    std::vector<std::size_t> idx(d.total());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 eng(seed + 2);
    std::shuffle(idx.begin(), idx.end(), eng);
    for (std::size_t i = 0; i < spikes; ++i) p.s0.data()[idx[i]] = (eng() & 1U) ? 10.0 : -10.0;
    p.x = p.l0 + p.s0;
    return p;
}

} // namespace

TEST(HardThreshold, ZeroBudget) {
    EXPECT_EQ(hard_threshold(random_cube({3, 3, 2}, 1), 0).count_nonzero(), 0u);
}

TEST(HardThreshold, BudgetCoversEverything) {
    const Cube x = random_cube({3, 3, 2}, 2);
    EXPECT_EQ(values(hard_threshold(x, 18)), values(x));
    EXPECT_EQ(values(hard_threshold(x, 100)), values(x));
}

TEST(HardThreshold, KeepsLargestMagnitudes) {
    const Cube x(Dims{4, 1, 1}, {5, -3, 1, 0});
    EXPECT_EQ(values(hard_threshold(x, 2)), (std::vector<double>{5, -3, 0, 0}));
}

TEST(HardThreshold, TiesKeepLowerIndex) {
    const Cube x(Dims{5, 1, 1}, {1, -2, 2, 2, -1});
    EXPECT_EQ(values(hard_threshold(x, 2)), (std::vector<double>{0, -2, 2, 0, 0}));
}

TEST(HardThreshold, NonzeroCountIsMinOfBudgetAndSupport) {
    const Cube x(Dims{6, 1, 1}, {0, 4, 0, 0, -1, 0});
    EXPECT_EQ(hard_threshold(x, 5).count_nonzero(), 2u);
    EXPECT_EQ(hard_threshold(x, 1).count_nonzero(), 1u);
}

TEST(HardThreshold, OptimalAgainstEnumeration) {
    std::mt19937_64 eng(3);
    std::uniform_int_distribution<int> small(-3, 3);
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            Cube x(n, 1, 1);
            for (auto& v : x.data()) v = small(eng); // integers force ties
            const std::vector<double> v = values(x);
            for (std::size_t k = 0; k <= 3; ++k) {
                const Cube s = hard_threshold(x, k);
                EXPECT_LE(s.count_nonzero(), k);
                EXPECT_EQ(objective(x, Cube(x.dims()), s), oracle::best_sparse_residual(v, k));
            }
        }
    }
}

TEST(Objective, Cases) {
    const Cube x = random_cube({3, 4, 2}, 4);
    const Cube l = random_cube({3, 4, 2}, 5);
    EXPECT_EQ(objective(x, l, x - l), 0.0);
    EXPECT_DOUBLE_EQ(objective(x, Cube(x.dims()), Cube(x.dims())), x.squared_norm());
    const Cube s = random_cube({3, 4, 2}, 6);
    double naive = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x.data()[i] - l.data()[i] - s.data()[i];
        naive += r * r;
    }
    EXPECT_NEAR(objective(x, l, s), naive, 1e-12 * naive);
    EXPECT_THROW(objective(x, Cube(3, 4, 3), s), DimMismatch);
}

TEST(DenoiseConfig, Validation) {
    DenoiseConfig c;
    EXPECT_NO_THROW(c.validate());
    c.r = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.eps = 0.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.eps = 1.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.max_iter = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.rank_tol = -1.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Denoise, ZeroInput) {
    EXPECT_THROW(denoise(Cube(4, 4, 2), DenoiseConfig{}), ZeroInput);
}

TEST(Denoise, RankAboveDims) {
    DenoiseConfig c;
    c.r = 5;
    EXPECT_THROW(denoise(random_cube({4, 4, 2}, 1), c), RankOutOfRange);
}

TEST(Denoise, LowRankInputConvergesQuickly) {
    const Cube x = planted_low_rank({20, 18, 6}, 3, RngSeed{7});
    DenoiseConfig c;
    c.r = 3;
    c.k = 10;
    c.seed = RngSeed{8};
    const DenoiseResult res = denoise(x, c);
    EXPECT_LE(res.iterations, 2u);
    EXPECT_LE(relative_error(res.l, x), 1e-6);
    EXPECT_LE(res.s.frobenius_norm(), 1e-6 * x.frobenius_norm());
    EXPECT_LE(res.final_residual(), c.eps);
}

TEST(Denoise, RecoversPlantedSpikes) {
    const Planted p = planted_with_spikes({20, 20, 8}, 80, 9);
    DenoiseConfig c;
    c.r = 3;
    c.k = 80;
    c.seed = RngSeed{10};
    const DenoiseResult res = denoise(p.x, c);
    EXPECT_LE(relative_error(res.l, p.l0), 1e-3);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < p.x.size(); ++i)
        hit += p.s0.data()[i] != 0.0 && res.s.data()[i] != 0.0;
    EXPECT_GE(hit, 76u);
    EXPECT_LE(res.final_residual(), c.eps);
}

TEST(Denoise, ZeroBudgetKeepsSparsePartEmpty) {
    const Cube x = random_cube({10, 10, 4}, 11);
    DenoiseConfig c;
    c.r = 2;
    c.k = 0;
    c.max_iter = 5;
    c.seed = RngSeed{12};
    const DenoiseResult res = denoise(x, c);
    EXPECT_EQ(res.s.count_nonzero(), 0u);
    EXPECT_LE(tubal_rank(res.l), 2u);
}

TEST(Denoise, InvariantsOnNoisyInput) {
    const Planted p = planted_with_spikes({16, 16, 5}, 30, 13);
    Cube x = p.x;
    std::mt19937_64 eng(14);
    std::normal_distribution<double> n(0.0, 0.05);
    for (auto& v : x.data()) v += n(eng);
    DenoiseConfig c;
    c.r = 3;
    c.k = 30;
    c.max_iter = 25;
    c.seed = RngSeed{15};
    const DenoiseResult res = denoise(x, c);
    EXPECT_LE(res.iterations, c.max_iter);
    EXPECT_EQ(res.residual_history.size(), res.iterations);
    EXPECT_EQ(res.effective_rank_history.size(), res.iterations);
    for (double r : res.residual_history) EXPECT_TRUE(std::isfinite(r));
    EXPECT_TRUE(res.final_residual() <= c.eps || res.iterations == c.max_iter || res.diverged);
    EXPECT_LE(tubal_rank(res.l, c.rank_tol), c.r);
    EXPECT_LE(res.s.count_nonzero(), c.k);
    EXPECT_TRUE(res.l.all_finite());
    EXPECT_GE(res.elapsed_seconds, 0.0);
}

TEST(Denoise, SparseStepNeverIncreasesObjective) {
    // Replays the alternation with the library primitives.
    const Planted p = planted_with_spikes({12, 12, 4}, 20, 16);
    Cube s(p.x.dims());
    for (std::uint64_t t = 0; t < 6; ++t) {
        const Cube l = low_tubal_rank_approx(p.x - s, 3, derive_seed(RngSeed{17}, t)).l;
        const Cube s_next = hard_threshold(p.x - l, 20);
        EXPECT_LE(objective(p.x, l, s_next), objective(p.x, l, s) * (1 + 1e-12) + 1e-300);
        s = s_next;
    }
}

TEST(Denoise, Deterministic) {
    const Planted p = planted_with_spikes({14, 12, 5}, 25, 18);
    DenoiseConfig c;
    c.r = 3;
    c.k = 25;
    c.max_iter = 10;
    c.seed = RngSeed{19};
    const DenoiseResult a = denoise(p.x, c);
    const DenoiseResult b = denoise(p.x, c);
    EXPECT_EQ(values(a.l), values(b.l));
    EXPECT_EQ(values(a.s), values(b.s));
    EXPECT_EQ(a.residual_history, b.residual_history);
    EXPECT_EQ(a.effective_rank_history, b.effective_rank_history);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Denoise, RankHistoryRecordsShrink) {
    const Cube x = planted_low_rank({12, 12, 3}, 2, RngSeed{20});
    DenoiseConfig c;
    c.r = 5;
    c.seed = RngSeed{21};
    const DenoiseResult res = denoise(x, c);
    ASSERT_FALSE(res.effective_rank_history.empty());
    EXPECT_EQ(res.effective_rank_history.front(), 2u);
    EXPECT_LE(relative_error(res.l, x), 1e-6);
}
