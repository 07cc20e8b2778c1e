#include "tubal/tsvd.hpp"

#include <algorithm>
#include <limits>

#include "tubal/errors.hpp"
#include "tubal/tproduct.hpp"

namespace tubal {

namespace {

struct SliceSvd {
    Eigen::MatrixXcd u;
    Eigen::VectorXd sigma;
    Eigen::MatrixXcd v;
};

// Self-conjugate Fourier slices are real; factor them with a real SVD so the
// singular vectors stay real and the inverse transform has no imaginary part.
SliceSvd slice_svd(const SpectralCube& xf, std::size_t k, unsigned options) {
    SliceSvd out;
    if (spectral::self_conjugate(k, xf.n3())) {
        const Eigen::MatrixXd m = xf.slice(k).real();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m, options);
        out.sigma = svd.singularValues();
        if (options & (Eigen::ComputeFullU | Eigen::ComputeThinU)) out.u = svd.matrixU().cast<std::complex<double>>();
        if (options & (Eigen::ComputeFullV | Eigen::ComputeThinV)) out.v = svd.matrixV().cast<std::complex<double>>();
    } else {
        const Eigen::MatrixXcd m = xf.slice(k);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, options);
        out.sigma = svd.singularValues();
        if (options & (Eigen::ComputeFullU | Eigen::ComputeThinU)) out.u = svd.matrixU();
        if (options & (Eigen::ComputeFullV | Eigen::ComputeThinV)) out.v = svd.matrixV();
    }
    return out;
}

} // namespace

std::size_t numerical_rank(const Eigen::VectorXd& sigma, std::size_t rows, std::size_t cols,
                           double tol) {
    if (sigma.size() == 0) return 0;
    double threshold = tol;
    if (tol <= 0.0) {
        threshold = static_cast<double>(std::max(rows, cols)) *
                    std::numeric_limits<double>::epsilon() * sigma.maxCoeff();
    }
    return static_cast<std::size_t>((sigma.array() > threshold).count());
}

TsvdFactors tsvd(const Cube& x) {
    const std::size_t n1 = x.n1();
    const std::size_t n2 = x.n2();
    const std::size_t n3 = x.n3();
    const SpectralCube xf = dft_tubes(x);
    SpectralCube uf(n1, n1, n3);
    SpectralCube sf(n1, n2, n3);
    SpectralCube vf(n2, n2, n3);
    spectral::for_each_independent(n3, [&](std::size_t k) {
        const SliceSvd svd = slice_svd(xf, k, Eigen::ComputeFullU | Eigen::ComputeFullV);
        uf.slice(k) = svd.u;
        vf.slice(k) = svd.v;
        for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) sf.slice(k)(j, j) = svd.sigma(j);
    });
    uf.mirror_conjugate();
    sf.mirror_conjugate();
    vf.mirror_conjugate();
    return {idft_tubes(uf), idft_tubes(sf), idft_tubes(vf)};
}

std::vector<Eigen::VectorXd> fourier_singular_values(const Cube& x) {
    return fourier_singular_values(dft_tubes(x));
}

std::vector<Eigen::VectorXd> fourier_singular_values(const SpectralCube& xf) {
    const std::size_t n3 = xf.n3();
    std::vector<Eigen::VectorXd> out(n3);
    spectral::for_each_independent(n3, [&](std::size_t k) { out[k] = slice_svd(xf, k, 0).sigma; });
    for (std::size_t k = xf.independent_slices(); k < n3; ++k) out[k] = out[n3 - k];
    return out;
}

MultiRank multi_rank(const Cube& x, double tol) { return multi_rank(dft_tubes(x), tol); }

MultiRank multi_rank(const SpectralCube& xf, double tol) {
    if (tol < 0.0) throw InvalidArgument("rank tolerance must be non-negative");
    MultiRank mr;
    mr.tolerance = tol;
    for (const auto& sigma : fourier_singular_values(xf)) {
        mr.ranks.push_back(numerical_rank(sigma, xf.n1(), xf.n2(), tol));
    }
    return mr;
}

std::size_t tubal_rank(const Cube& x, double tol) { return tubal_rank(dft_tubes(x), tol); }

std::size_t tubal_rank(const SpectralCube& xf, double tol) {
    const MultiRank mr = multi_rank(xf, tol);
    return *std::max_element(mr.ranks.begin(), mr.ranks.end());
}

double tnn(const Cube& x) {
    double total = 0.0;
    for (const auto& sigma : fourier_singular_values(x)) total += sigma.sum();
    return total;
}

Cube truncated_tsvd(const Cube& x, std::size_t r) {
    if (r < 1 || r > std::min(x.n1(), x.n2())) {
        throw RankOutOfRange("truncation rank " + std::to_string(r) + " outside [1, " +
                             std::to_string(std::min(x.n1(), x.n2())) + "]");
    }
    const SpectralCube xf = dft_tubes(x);
    SpectralCube lf(x.dims());
    const auto rr = static_cast<Eigen::Index>(r);
    spectral::for_each_independent(x.n3(), [&](std::size_t k) {
        const SliceSvd svd = slice_svd(xf, k, Eigen::ComputeThinU | Eigen::ComputeThinV);
        lf.slice(k).noalias() = svd.u.leftCols(rr) * svd.sigma.head(rr).cast<std::complex<double>>().asDiagonal() *
                                svd.v.leftCols(rr).adjoint();
    });
    lf.mirror_conjugate();
    return idft_tubes(lf);
}

} // namespace tubal
