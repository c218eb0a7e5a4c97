#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace camp::detail {

// Truncated power-series arithmetic on raw coefficient vectors, templated on
// the scalar so the same code runs in double and in extended precision.
// Index convention: c[t] is the coefficient of z^{-t}; coefficients outside
// [0, T] are zero.

template <typename T>
T series_at(const std::vector<T>& c, long t) {
    if (t < 0 || t >= static_cast<long>(c.size())) return T(0);
    return c[static_cast<std::size_t>(t)];
}

template <typename T>
std::vector<T> series_convolve(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("series_convolve: horizon mismatch");
    const std::size_t n = a.size();
    std::vector<T> out(n, T(0));
    for (std::size_t t = 0; t < n; ++t) {
        T acc(0);
        for (std::size_t s = 0; s <= t; ++s) acc += a[s] * b[t - s];
        out[t] = acc;
    }
    return out;
}

template <typename T>
std::vector<T> series_add(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("series_add: horizon mismatch");
    std::vector<T> out(a);
    for (std::size_t t = 0; t < b.size(); ++t) out[t] += b[t];
    return out;
}

template <typename T>
std::vector<T> series_sub(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("series_sub: horizon mismatch");
    std::vector<T> out(a);
    for (std::size_t t = 0; t < b.size(); ++t) out[t] -= b[t];
    return out;
}

// Multiplication by z^{-k}: shifts coefficients toward higher lags, dropping
// anything past the horizon.
template <typename T>
std::vector<T> series_shift(const std::vector<T>& a, std::size_t k) {
    std::vector<T> out(a.size(), T(0));
    for (std::size_t t = k; t < a.size(); ++t) out[t] = a[t - k];
    return out;
}

// Coefficients of A(z)/B(z) with b[0] != 0, truncated at the common horizon.
template <typename T>
std::vector<T> series_divide(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("series_divide: horizon mismatch");
    if (b.empty() || b[0] == T(0))
        throw std::invalid_argument("series_divide: divisor has zero leading coefficient");
    const std::size_t n = a.size();
    std::vector<T> out(n, T(0));
    for (std::size_t t = 0; t < n; ++t) {
        T acc = a[t];
        for (std::size_t s = 1; s <= t; ++s) acc -= b[s] * out[t - s];
        out[t] = acc / b[0];
    }
    return out;
}

// Composition sum_j coeffs[j] * X(z)^j for a series X with X[0] = 0.
// Because X starts at order one, only j <= T contributes up to the horizon.
template <typename T>
std::vector<T> series_apply_power_series(const std::vector<T>& coeffs,
                                         const std::vector<T>& x) {
    if (x.empty() || x[0] != T(0))
        throw std::invalid_argument(
            "series_apply_power_series: inner series must have zero constant term");
    const std::size_t n = x.size();
    std::vector<T> out(n, T(0));
    if (!coeffs.empty()) out[0] = coeffs[0];
    std::vector<T> xpow(n, T(0));
    xpow[0] = T(1);
    const std::size_t jmax = coeffs.size() < n ? coeffs.size() : n;
    for (std::size_t j = 1; j < jmax; ++j) {
        xpow = series_convolve(xpow, x);
        for (std::size_t t = 0; t < n; ++t) out[t] += coeffs[j] * xpow[t];
    }
    return out;
}

}  // namespace camp::detail
