#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace camp {

/// Finite real sequence c_0..c_T indexed by nonnegative lag, with the
/// convention c_t = 0 outside [0, T]. All tap and generating-function
/// manipulations in the library go through this type so the negative-index
/// convention lives in exactly one place.
class Series {
public:
    Series() = default;
    explicit Series(std::size_t horizon) : coeffs_(horizon + 1, 0.0) {}
    Series(std::initializer_list<double> values, std::size_t horizon);
    Series(std::vector<double> coeffs);

    /// Kronecker-delta series (1, 0, 0, ...), the convolution identity.
    static Series identity(std::size_t horizon);

    std::size_t horizon() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
    std::size_t size() const { return coeffs_.size(); }

    /// Coefficient access honoring c_t = 0 for t < 0 and t > T.
    double at(long t) const;
    double& operator[](std::size_t t) { return coeffs_[t]; }
    double operator[](std::size_t t) const { return coeffs_[t]; }

    const std::vector<double>& coeffs() const { return coeffs_; }

    Series convolve(const Series& other) const;
    Series add(const Series& other) const;
    Series sub(const Series& other) const;
    /// Multiplication by z^{-k} (shift toward higher lags).
    Series shift(std::size_t k) const;
    Series scale(double factor) const;
    /// Coefficients of this/other, requires other[0] != 0.
    Series divide(const Series& other) const;

    bool operator==(const Series& other) const = default;

private:
    std::vector<double> coeffs_;
};

}  // namespace camp
