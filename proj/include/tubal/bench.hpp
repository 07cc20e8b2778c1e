#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tubal/cube.hpp"
#include "tubal/random.hpp"

namespace tubal {

/// tprod of n1 x r x n3 and r x n2 x n3 factors. Gaussian factors give exact
/// tubal rank r; with `nonnegative` the factors are uniform on [0, 1) and the
/// product is rescaled so its largest entry is 1 (entries in [0, 1]).
Cube planted_low_rank(const Dims& dims, std::size_t r, RngSeed seed, bool nonnegative = false);

enum class BenchMethod { tsvd_truncation, tbrp };

std::string to_string(BenchMethod m);

struct BenchRecord {
    BenchMethod method = BenchMethod::tbrp;
    Dims dims;
    std::size_t r = 0;
    double wall_seconds = 0.0; ///< median over trials
    double rel_error = 0.0;    ///< ||approx - x||_F / ||x||_F on the noisy input, median
};

struct BenchOptions {
    std::vector<std::size_t> sizes{32, 64, 128};
    std::size_t r = 5;
    std::size_t n3 = 16;
    std::size_t trials = 3;
    double noise_level = 1e-2; ///< Gaussian std relative to the planted cube's RMS
    RngSeed seed{0};
};

/// For every size n builds an n x n x n3 planted cube plus Gaussian noise and
/// times truncated_tsvd against low_tubal_rank_approx. Two records per size.
std::vector<BenchRecord> run_bench(const BenchOptions& options);

std::string bench_csv_header();
std::string to_csv_row(const BenchRecord& record);

} // namespace tubal
