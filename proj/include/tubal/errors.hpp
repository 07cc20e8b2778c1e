#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tubal {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operand shapes are not conformable.
class DimMismatch : public Error {
public:
    using Error::Error;
};

/// A spectral cube whose inverse transform is not real.
class SymmetryViolation : public Error {
public:
    using Error::Error;
};

/// A Fourier-domain slice is numerically singular. Raised by tensor inversion
/// and by the bilateral-projection Gram solve.
class SingularSlice : public Error {
public:
    SingularSlice(std::size_t slice, double cond)
        : Error("singular Fourier slice " + std::to_string(slice) +
                " (condition estimate " + std::to_string(cond) + ")"),
          slice_(slice), cond_(cond) {}

    [[nodiscard]] std::size_t slice() const noexcept { return slice_; }
    [[nodiscard]] double cond() const noexcept { return cond_; }

private:
    std::size_t slice_;
    double cond_;
};

using SingularGram = SingularSlice;

class RankOutOfRange : public Error {
public:
    using Error::Error;
};

class RestartLimitExceeded : public Error {
public:
    using Error::Error;
};

class ZeroInput : public Error {
public:
    using Error::Error;
};

class SpecExceedsDims : public Error {
public:
    using Error::Error;
};

class TooSmall : public Error {
public:
    using Error::Error;
};

class AllPixelsDegenerate : public Error {
public:
    using Error::Error;
};

/// File-system and file-format failures. Subclasses identify malformed input.
class IoError : public Error {
public:
    using Error::Error;
};

class BadMagic : public IoError {
public:
    using IoError::IoError;
};

class TruncatedFile : public IoError {
public:
    using IoError::IoError;
};

class BadDtype : public IoError {
public:
    using IoError::IoError;
};

class SizeMismatch : public IoError {
public:
    using IoError::IoError;
};

class BadLayout : public IoError {
public:
    using IoError::IoError;
};

} // namespace tubal
