#include "tubal/tproduct.hpp"

#include <cmath>
#include <limits>

#include "fft.hpp"
#include "tubal/errors.hpp"

namespace tubal {

namespace {

constexpr double kImagResidueTol = 1e-6;

} // namespace

double max_condition() { return 1.0 / (100.0 * std::numeric_limits<double>::epsilon()); }

SpectralCube dft_tubes(const Cube& x) {
    SpectralCube xf(x.dims());
    fft::forward_tubes(x.data().data(), xf.data().data(), x.dims());
    xf.mirror_conjugate();
    return xf;
}

Cube idft_tubes(const SpectralCube& xf) {
    const double bound = kImagResidueTol * xf.max_abs();
    // The imaginary part of the inverse is the inverse of the anti-Hermitian
    // part, whose entries are bounded by asymmetry(); only compute it exactly
    // when that bound is inconclusive.
    if (xf.asymmetry() > bound) {
        std::vector<std::complex<double>> full(xf.size());
        fft::inverse_tubes_complex(xf.data().data(), full.data(), xf.dims());
        double worst = 0.0;
        for (const auto& v : full) worst = std::max(worst, std::abs(v.imag()));
        if (worst > bound) {
            throw SymmetryViolation("inverse DFT has imaginary residue " + std::to_string(worst) +
                                    " above bound " + std::to_string(bound));
        }
    }
    Cube x(xf.dims());
    fft::inverse_tubes_real(xf.data().data(), x.data().data(), xf.dims());
    return x;
}

namespace spectral {

void for_each_independent(std::size_t n3, const std::function<void(std::size_t)>& fn) {
    const std::size_t half = n3 / 2 + 1;
    for (std::size_t k = 0; k < half; ++k) fn(k);
}

SpectralCube product(const SpectralCube& a, const SpectralCube& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3()) {
        throw DimMismatch("t-product of " + to_string(a.dims()) + " and " + to_string(b.dims()));
    }
    SpectralCube c(a.n1(), b.n2(), a.n3());
    for_each_independent(a.n3(), [&](std::size_t k) { c.slice(k).noalias() = a.slice(k) * b.slice(k); });
    c.mirror_conjugate();
    return c;
}

SpectralCube adjoint_product(const SpectralCube& a, const SpectralCube& b) {
    if (a.n1() != b.n1() || a.n3() != b.n3()) {
        throw DimMismatch("adjoint t-product of " + to_string(a.dims()) + " and " +
                          to_string(b.dims()));
    }
    SpectralCube c(a.n2(), b.n2(), a.n3());
    for_each_independent(a.n3(), [&](std::size_t k) {
        c.slice(k).noalias() = a.slice(k).adjoint() * b.slice(k);
    });
    c.mirror_conjugate();
    return c;
}

SpectralCube adjoint(const SpectralCube& a) {
    SpectralCube c(a.n2(), a.n1(), a.n3());
    for_each_independent(a.n3(), [&](std::size_t k) { c.slice(k) = a.slice(k).adjoint(); });
    c.mirror_conjugate();
    return c;
}

double condition_number(const Eigen::Ref<const ComplexRowMatrix>& m) {
    // LU-based rcond estimates can report 1 for exactly singular input, so the
    // singular values are computed outright; slices here are small.
    const Eigen::VectorXd sigma = Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
    if (sigma.size() == 0) return std::numeric_limits<double>::infinity();
    const double lo = sigma(sigma.size() - 1);
    if (!(lo > 0.0) || !std::isfinite(sigma(0))) return std::numeric_limits<double>::infinity();
    return sigma(0) / lo;
}

} // namespace spectral

Cube tprod(const Cube& a, const Cube& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3()) {
        throw DimMismatch("t-product of " + to_string(a.dims()) + " and " + to_string(b.dims()));
    }
    return idft_tubes(spectral::product(dft_tubes(a), dft_tubes(b)));
}

Cube ttranspose(const Cube& a) {
    const std::size_t n3 = a.n3();
    Cube t(a.n2(), a.n1(), n3);
    for (std::size_t k = 0; k < n3; ++k) {
        t.slice(k) = a.slice((n3 - k) % n3).transpose();
    }
    return t;
}

Cube identity_tensor(std::size_t n, std::size_t n3) {
    Cube id(n, n, n3);
    id.slice(0).setIdentity();
    return id;
}

Cube tinverse(const Cube& a) {
    if (a.n1() != a.n2()) {
        throw DimMismatch("tensor inverse needs square slices, got " + to_string(a.dims()));
    }
    const SpectralCube af = dft_tubes(a);
    SpectralCube inv(a.dims());
    spectral::for_each_independent(a.n3(), [&](std::size_t k) {
        const double cond = spectral::condition_number(af.slice(k));
        if (cond > max_condition()) throw SingularSlice(k, cond);
        inv.slice(k) = Eigen::PartialPivLU<ComplexRowMatrix>(af.slice(k)).inverse();
    });
    inv.mirror_conjugate();
    return idft_tubes(inv);
}

} // namespace tubal
