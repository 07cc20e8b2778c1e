#include "tubal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "tubal/brp.hpp"
#include "tubal/errors.hpp"
#include "tubal/noise.hpp"
#include "tubal/tproduct.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template<typename Fn>
double time_seconds(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

Cube planted_low_rank(const Dims& dims, std::size_t r, RngSeed seed, bool nonnegative) {
    if (r < 1 || r > std::min(dims.n1, dims.n2)) {
        throw RankOutOfRange("planted rank " + std::to_string(r) + " out of range for " + to_string(dims));
    }
    Cube left(dims.n1, r, dims.n3);
    Cube right(r, dims.n2, dims.n3);
    auto engine = make_engine(seed);
    if (nonnegative) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& v : left.data()) v = u(engine);
        for (auto& v : right.data()) v = u(engine);
    } else {
        std::normal_distribution<double> g(0.0, 1.0);
        for (auto& v : left.data()) v = g(engine);
        for (auto& v : right.data()) v = g(engine);
    }
    Cube x = tprod(left, right);
    if (nonnegative) {
        x *= 1.0 / x.max_abs();
    }
    return x;
}

std::string to_string(BenchMethod m) {
    return m == BenchMethod::tbrp ? "tbrp" : "tsvd_truncation";
}

std::vector<BenchRecord> run_bench(const BenchOptions& options) {
    if (options.trials < 1) throw InvalidArgument("bench needs at least one trial");
    std::vector<BenchRecord> records;
    for (const std::size_t n : options.sizes) {
        const Dims dims{n, n, options.n3};
        const RngSeed size_seed = derive_seed(options.seed, n);
        Cube clean = planted_low_rank(dims, options.r, derive_seed(size_seed, 0));
        const double rms = clean.frobenius_norm() / std::sqrt(static_cast<double>(clean.size()));
        const Cube x = add_gaussian(clean, options.noise_level * rms, derive_seed(size_seed, 1));

        std::vector<double> svd_times, svd_errors, brp_times, brp_errors;
        for (std::size_t t = 0; t < options.trials; ++t) {
            Cube approx;
            svd_times.push_back(time_seconds([&] { approx = truncated_tsvd(x, options.r); }));
            svd_errors.push_back(relative_error(approx, x));
            LowRankApprox lr;
            brp_times.push_back(time_seconds(
                [&] { lr = low_tubal_rank_approx(x, options.r, derive_seed(size_seed, 100 + t)); }));
            brp_errors.push_back(relative_error(lr.l, x));
        }
        records.push_back({BenchMethod::tsvd_truncation, dims, options.r,
                           std::max(median(svd_times), 1e-9), median(svd_errors)});
        records.push_back({BenchMethod::tbrp, dims, options.r, std::max(median(brp_times), 1e-9),
                           median(brp_errors)});
    }
    return records;
}

std::string bench_csv_header() { return "method,n1,n2,n3,r,wall_seconds,rel_error"; }

std::string to_csv_row(const BenchRecord& rec) {
    std::ostringstream os;
    os.precision(10);
    os << to_string(rec.method) << ',' << rec.dims.n1 << ',' << rec.dims.n2 << ',' << rec.dims.n3
       << ',' << rec.r << ',' << rec.wall_seconds << ',' << rec.rel_error;
    return os.str();
}

} // namespace tubal
