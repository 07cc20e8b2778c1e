#include "tubal/cube.hpp"

#include <algorithm>
#include <cmath>

#include "tubal/errors.hpp"

namespace tubal {

std::string to_string(const Dims& d) {
    return std::to_string(d.n1) + "x" + std::to_string(d.n2) + "x" + std::to_string(d.n3);
}

namespace detail {

template<typename Scalar>
CubeStorage<Scalar>::CubeStorage(Dims dims) : dims_(dims) {
    if (dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0) {
        throw InvalidArgument("cube dimensions must be positive, got " + to_string(dims));
    }
    data_.assign(dims.total(), Scalar{});
}

template<typename Scalar>
CubeStorage<Scalar>::CubeStorage(Dims dims, std::vector<Scalar> data) : dims_(dims) {
    if (dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0) {
        throw InvalidArgument("cube dimensions must be positive, got " + to_string(dims));
    }
    if (data.size() != dims.total()) {
        throw DimMismatch("cube " + to_string(dims) + " needs " + std::to_string(dims.total()) +
                          " values, got " + std::to_string(data.size()));
    }
    data_ = std::move(data);
}

template<typename Scalar>
double CubeStorage<Scalar>::squared_norm() const {
    double acc = 0.0;
    for (const auto& v : data_) acc += std::norm(v);
    return acc;
}

template<typename Scalar>
double CubeStorage<Scalar>::frobenius_norm() const {
    return std::sqrt(squared_norm());
}

template<typename Scalar>
double CubeStorage<Scalar>::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
}

template class CubeStorage<double>;
template class CubeStorage<std::complex<double>>;

} // namespace detail

Cube Cube::from_slice(const Eigen::Ref<const RowMatrix>& m) {
    Cube c(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), 1);
    c.slice(0) = m;
    return c;
}

std::size_t Cube::count_nonzero() const {
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](double v) { return v != 0.0; }));
}

bool Cube::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Cube& Cube::operator+=(const Cube& other) {
    if (dims_ != other.dims_) {
        throw DimMismatch("cannot add " + to_string(other.dims_) + " to " + to_string(dims_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Cube& Cube::operator-=(const Cube& other) {
    if (dims_ != other.dims_) {
        throw DimMismatch("cannot subtract " + to_string(other.dims_) + " from " +
                          to_string(dims_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Cube& Cube::operator*=(double alpha) {
    for (auto& v : data_) v *= alpha;
    return *this;
}

Cube operator+(Cube a, const Cube& b) { return a += b; }
Cube operator-(Cube a, const Cube& b) { return a -= b; }
Cube operator*(double alpha, Cube a) { return a *= alpha; }

void SpectralCube::mirror_conjugate() {
    const std::size_t n3 = dims_.n3;
    for (std::size_t k = independent_slices(); k < n3; ++k) {
        slice(k) = slice(n3 - k).conjugate();
    }
}

double SpectralCube::asymmetry() const {
    const std::size_t n3 = dims_.n3;
    const std::size_t ss = dims_.slice_size();
    double worst = 0.0;
    for (std::size_t k = 0; k < independent_slices(); ++k) {
        const std::size_t mk = (n3 - k) % n3;
        for (std::size_t p = 0; p < ss; ++p) {
            const auto d = data_[k * ss + p] - std::conj(data_[mk * ss + p]);
            worst = std::max(worst, 0.5 * std::abs(d));
        }
    }
    return worst;
}

double relative_error(const Cube& a, const Cube& b) {
    const double denom = b.frobenius_norm();
    const double num = (a - b).frobenius_norm();
    return denom > 0.0 ? num / denom : num;
}

} // namespace tubal
