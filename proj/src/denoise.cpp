#include "tubal/denoise.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "tubal/errors.hpp"

namespace tubal {

void DenoiseConfig::validate() const {
    if (r < 1) throw InvalidArgument("rank budget r must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
    if (rank_tol < 0.0) throw InvalidArgument("rank_tol must be >= 0");
    if (divergence_window < 1) throw InvalidArgument("divergence_window must be >= 1");
}

Cube hard_threshold(const Cube& x, std::size_t k) {
    const std::size_t n = x.size();
    if (k >= n) return x;
    Cube out(x.dims());
    if (k == 0) return out;
    const auto v = x.data();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto before = [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(v[a]);
        const double mb = std::abs(v[b]);
        return ma > mb || (ma == mb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), before);
    auto o = out.data();
    for (std::size_t i = 0; i < k; ++i) o[idx[i]] = v[idx[i]];
    return out;
}

double objective(const Cube& x, const Cube& l, const Cube& s) {
    if (x.dims() != l.dims() || x.dims() != s.dims()) {
        throw DimMismatch("objective operands " + to_string(x.dims()) + ", " +
                          to_string(l.dims()) + ", " + to_string(s.dims()));
    }
    const auto xv = x.data();
    const auto lv = l.data();
    const auto sv = s.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double d = xv[i] - lv[i] - sv[i];
        acc += d * d;
    }
    return acc;
}

DenoiseResult denoise(const Cube& x, const DenoiseConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const double x_norm2 = x.squared_norm();
    if (!(x_norm2 > 0.0)) throw ZeroInput("denoise input has zero Frobenius norm");
    if (cfg.r > std::min(x.n1(), x.n2())) {
        throw RankOutOfRange("rank budget " + std::to_string(cfg.r) + " exceeds min(n1, n2) for " +
                             to_string(x.dims()));
    }

    DenoiseResult res;
    res.l = Cube(x.dims());
    res.s = Cube(x.dims());
    Cube best_l = res.l;
    Cube best_s = res.s;
    double best_residual = 1.0;
    std::size_t rising = 0;

    // The detected rank persists: once the sketch shows r is too large, later
    // iterations use the shrunk value.
    std::size_t r = cfg.r;
    double residual = 1.0;
    std::size_t t = 0;
    while (residual > cfg.eps && t < cfg.max_iter) {
        ++t;
        LowRankApprox lr = low_tubal_rank_approx(x - res.s, r, derive_seed(cfg.seed, t), cfg.rank_tol);
        if (lr.effective_r > 0) r = lr.effective_r;
        res.l = std::move(lr.l);
        res.s = hard_threshold(x - res.l, cfg.k);

        const double previous = residual;
        residual = objective(x, res.l, res.s) / x_norm2;
        res.residual_history.push_back(residual);
        res.effective_rank_history.push_back(lr.effective_r);

        if (residual < best_residual || t == 1) {
            best_residual = residual;
            best_l = res.l;
            best_s = res.s;
            res.best_iteration = t;
        }
        rising = (t > 1 && residual > previous) ? rising + 1 : 0;
        if (rising >= cfg.divergence_window) {
            res.diverged = true;
            break;
        }
    }
    res.iterations = t;
    if (res.diverged) {
        res.l = std::move(best_l);
        res.s = std::move(best_s);
    } else {
        res.best_iteration = t;
    }
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

} // namespace tubal
