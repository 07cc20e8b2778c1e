#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tubal {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexRowMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Dims {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t n3 = 0;

    [[nodiscard]] std::size_t slice_size() const noexcept { return n1 * n2; }
    [[nodiscard]] std::size_t total() const noexcept { return n1 * n2 * n3; }

    friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

namespace detail {

template<typename Scalar>
class CubeStorage {
public:
    using Slice = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using SliceMap = Eigen::Map<Slice>;
    using ConstSliceMap = Eigen::Map<const Slice>;

    CubeStorage() = default;
    explicit CubeStorage(Dims dims);
    CubeStorage(Dims dims, std::vector<Scalar> data);
    CubeStorage(std::size_t n1, std::size_t n2, std::size_t n3) : CubeStorage(Dims{n1, n2, n3}) {}

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t n1() const noexcept { return dims_.n1; }
    [[nodiscard]] std::size_t n2() const noexcept { return dims_.n2; }
    [[nodiscard]] std::size_t n3() const noexcept { return dims_.n3; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[k * dims_.slice_size() + i * dims_.n2 + j];
    }
    const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[k * dims_.slice_size() + i * dims_.n2 + j];
    }

    [[nodiscard]] std::span<Scalar> data() noexcept { return data_; }
    [[nodiscard]] std::span<const Scalar> data() const noexcept { return data_; }

    /// Frontal slice k (0-based) as an n1 x n2 matrix view.
    SliceMap slice(std::size_t k) {
        return SliceMap(data_.data() + k * dims_.slice_size(),
                        static_cast<Eigen::Index>(dims_.n1), static_cast<Eigen::Index>(dims_.n2));
    }
    ConstSliceMap slice(std::size_t k) const {
        return ConstSliceMap(data_.data() + k * dims_.slice_size(),
                             static_cast<Eigen::Index>(dims_.n1),
                             static_cast<Eigen::Index>(dims_.n2));
    }

    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] double max_abs() const;

protected:
    Dims dims_{};
    std::vector<Scalar> data_;
};

} // namespace detail

/// Dense real n1 x n2 x n3 tensor, frontal slices stored contiguously and
/// row-major within each slice.
class Cube : public detail::CubeStorage<double> {
public:
    using CubeStorage::CubeStorage;

    static Cube zeros(Dims dims) { return Cube(dims); }
    static Cube from_slice(const Eigen::Ref<const RowMatrix>& m);

    [[nodiscard]] std::size_t count_nonzero() const;
    [[nodiscard]] bool all_finite() const;

    Cube& operator+=(const Cube& other);
    Cube& operator-=(const Cube& other);
    Cube& operator*=(double alpha);
};

Cube operator+(Cube a, const Cube& b);
Cube operator-(Cube a, const Cube& b);
Cube operator*(double alpha, Cube a);

/// Complex cube holding the per-tube DFT of a real cube.
class SpectralCube : public detail::CubeStorage<std::complex<double>> {
public:
    using CubeStorage::CubeStorage;

    /// Number of leading slices that determine a conjugate-symmetric cube.
    [[nodiscard]] std::size_t independent_slices() const noexcept { return dims_.n3 / 2 + 1; }

    /// Overwrites slices past independent_slices() with conjugates of their mirrors.
    void mirror_conjugate();

    /// Largest |slice(k) - conj(slice(n3-k))| over all tubes, halved.
    [[nodiscard]] double asymmetry() const;
};

/// Relative Frobenius distance ||a - b|| / ||b|| (absolute when b is zero).
double relative_error(const Cube& a, const Cube& b);

} // namespace tubal
