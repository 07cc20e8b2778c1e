#include "tubal/brp.hpp"

#include <algorithm>
#include <limits>

#include "tubal/errors.hpp"
#include "tubal/tproduct.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

RngSeed derive_seed(RngSeed parent, std::uint64_t index) {
    std::uint64_t z = parent.seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return {z ^ (z >> 31)};
}

Cube gaussian_cube(std::size_t n1, std::size_t n2, std::size_t n3, RngSeed seed) {
    Cube c(n1, n2, n3);
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : c.data()) v = normal(engine);
    return c;
}

namespace {

struct SpectralSketch {
    Cube a1;
    SpectralCube a1f;
    SpectralCube y1f; // also A2
    SpectralCube y2f;
    std::size_t r = 0;
};

void check_rank(const Dims& d, std::size_t r) {
    if (r < 1 || r > std::min(d.n1, d.n2)) {
        throw RankOutOfRange("sketch rank " + std::to_string(r) + " outside [1, " +
                             std::to_string(std::min(d.n1, d.n2)) + "] for cube " + to_string(d));
    }
}

SpectralSketch sketch(const SpectralCube& xf, std::size_t r, RngSeed seed) {
    SpectralSketch s;
    s.r = r;
    s.a1 = gaussian_cube(xf.n2(), r, xf.n3(), seed);
    s.a1f = dft_tubes(s.a1);
    s.y1f = spectral::product(xf, s.a1f);
    s.y2f = spectral::adjoint_product(xf, s.y1f);
    return s;
}

std::size_t rank_check(const SpectralCube& a1f, const SpectralCube& a2f, const SpectralCube& y2f,
                       double tol) {
    const bool square = a2f.n1() == y2f.n1();
    const SpectralCube g = spectral::adjoint_product(square ? a2f : a1f, y2f);
    return tubal_rank(g, tol);
}

// Per Fourier slice: L = Y1 (A2^H Y1)^-1 Y2^H. With allow_pinv, singular Gram
// slices fall back to an SVD pseudo-inverse instead of throwing.
SpectralCube approx(const SpectralCube& y1f, const SpectralCube& a2f, const SpectralCube& y2f,
                    bool allow_pinv, bool* used_pinv) {
    SpectralCube lf(y1f.n1(), y2f.n1(), y1f.n3());
    spectral::for_each_independent(y1f.n3(), [&](std::size_t k) {
        const ComplexRowMatrix gram = a2f.slice(k).adjoint() * y1f.slice(k);
        const ComplexRowMatrix rhs = y2f.slice(k).adjoint();
        const double cond = spectral::condition_number(gram);
        ComplexRowMatrix z;
        if (cond <= max_condition()) {
            z = Eigen::PartialPivLU<ComplexRowMatrix>(gram).solve(rhs);
        } else if (allow_pinv) {
            const Eigen::MatrixXcd g = gram;
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Eigen::VectorXd& sigma = svd.singularValues();
            const std::size_t rank = numerical_rank(sigma, gram.rows(), gram.cols(), 0.0);
            const auto rr = static_cast<Eigen::Index>(rank);
            Eigen::VectorXcd inv_sigma = sigma.head(rr).cwiseInverse().cast<std::complex<double>>();
            z = svd.matrixV().leftCols(rr) * inv_sigma.asDiagonal() *
                (svd.matrixU().leftCols(rr).adjoint() * rhs);
            if (used_pinv != nullptr) *used_pinv = true;
        } else {
            throw SingularGram(k, cond);
        }
        lf.slice(k).noalias() = y1f.slice(k) * z;
    });
    lf.mirror_conjugate();
    return lf;
}

} // namespace

BrpSketch brp_sketch(const Cube& x, std::size_t r, RngSeed seed) {
    check_rank(x.dims(), r);
    const SpectralSketch s = sketch(dft_tubes(x), r, seed);
    BrpSketch out;
    out.a1 = s.a1;
    out.y1 = idft_tubes(s.y1f);
    out.a2 = out.y1;
    out.y2 = idft_tubes(s.y2f);
    out.effective_r = r;
    return out;
}

std::size_t brp_rank_check(const BrpSketch& sketch, double tol) {
    return rank_check(dft_tubes(sketch.a1), dft_tubes(sketch.a2), dft_tubes(sketch.y2), tol);
}

Cube brp_approx(const BrpSketch& sketch) {
    if (sketch.y1.n1() != sketch.a2.n1() || sketch.y1.n2() != sketch.a2.n2() ||
        sketch.y1.n2() != sketch.y2.n2()) {
        throw DimMismatch("inconsistent sketch shapes: y1 " + to_string(sketch.y1.dims()) +
                          ", a2 " + to_string(sketch.a2.dims()) + ", y2 " +
                          to_string(sketch.y2.dims()));
    }
    return idft_tubes(approx(dft_tubes(sketch.y1), dft_tubes(sketch.a2), dft_tubes(sketch.y2),
                             false, nullptr));
}

LowRankApprox low_tubal_rank_approx(const Cube& x, std::size_t r, RngSeed seed, double tol,
                                    const BrpOptions& options) {
    check_rank(x.dims(), r);
    const SpectralCube xf = dft_tubes(x);
    std::size_t current = r;
    for (std::size_t attempt = 0; attempt <= options.max_restarts; ++attempt) {
        const RngSeed draw = attempt == 0 ? seed : derive_seed(seed, attempt);
        const SpectralSketch s = sketch(xf, current, draw);
        const std::size_t detected = rank_check(s.a1f, s.y1f, s.y2f, tol);
        if (detected == 0) return {Cube(x.dims()), 0, attempt, false};
        if (detected < current) {
            current = detected;
            continue;
        }
        const bool last = attempt == options.max_restarts;
        try {
            bool used_pinv = false;
            Cube l = idft_tubes(approx(s.y1f, s.y1f, s.y2f, last, &used_pinv));
            return {std::move(l), current, attempt, used_pinv};
        } catch (const SingularSlice&) {
            // The Gram tensor lost rank even though the check passed; shrink to
            // its rank and redraw.
            const SpectralCube gram = spectral::adjoint_product(s.y1f, s.y1f);
            const std::size_t gram_rank = tubal_rank(gram, tol);
            if (gram_rank == 0) return {Cube(x.dims()), 0, attempt, false};
            current = std::min(current, gram_rank);
        }
    }
    throw RestartLimitExceeded("tubal rank did not stabilize after " +
                               std::to_string(options.max_restarts) + " restarts (last r = " +
                               std::to_string(current) + ")");
}

} // namespace tubal
