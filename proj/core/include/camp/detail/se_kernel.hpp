#pragma once

#include <cstddef>
#include <vector>

namespace camp::detail {

// Dense (T+1) x (T+1) array with value-zero reads outside the square,
// indexed [tau'][tau].
template <typename T>
struct Array2 {
    std::size_t n = 0;  // side length
    std::vector<T> v;

    explicit Array2(std::size_t side) : n(side), v(side * side, T(0)) {}
    T& at(std::size_t i, std::size_t j) { return v[i * n + j]; }
    T at(std::size_t i, std::size_t j) const { return v[i * n + j]; }
};

// Two-dimensional truncated convolution; iterates the sparser operand.
template <typename T>
Array2<T> conv2(const Array2<T>& a, const Array2<T>& b) {
    const std::size_t n = a.n;
    Array2<T> out(n);
    std::size_t nnz_a = 0, nnz_b = 0;
    for (const T& x : a.v) nnz_a += (x != T(0));
    for (const T& x : b.v) nnz_b += (x != T(0));
    const Array2<T>& s = nnz_a <= nnz_b ? a : b;
    const Array2<T>& d = nnz_a <= nnz_b ? b : a;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const T x = s.at(i, j);
            if (x == T(0)) continue;
            for (std::size_t u = 0; i + u < n; ++u)
                for (std::size_t w = 0; j + w < n; ++w)
                    out.at(i + u, j + w) += x * d.at(u, w);
        }
    }
    return out;
}

template <typename T>
T series_coeff(const std::vector<T>& s, long t) {
    if (t < 0 || t >= static_cast<long>(s.size())) return T(0);
    return s[static_cast<std::size_t>(t)];
}

// One-dimensional series in z embedded as a 2-D array (row tau' = 0).
template <typename T>
Array2<T> embed_z(const std::vector<T>& s, std::size_t n) {
    Array2<T> out(n);
    for (std::size_t t = 0; t < n; ++t) out.at(0, t) = series_coeff(s, t);
    return out;
}

// Inverse Z-transform of Delta_S = [S(y) - S(z)]/(y^{-1} - z^{-1}):
// the anti-diagonal array s_{tau'+tau+1}.
template <typename T>
Array2<T> delta_of(const std::vector<T>& s, std::size_t n) {
    Array2<T> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.at(i, j) = series_coeff(s, static_cast<long>(i + j) + 1);
    return out;
}

// Inverse Z-transform of Delta_{S_1}: s_{tau'+tau}.
template <typename T>
Array2<T> delta1_of(const std::vector<T>& s, std::size_t n) {
    Array2<T> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.at(i, j) = series_coeff(s, static_cast<long>(i + j));
    return out;
}

// Inverse Z-transform of y^{-1} Delta_S: s_{tau'+tau} - delta_{tau',0} s_tau.
template <typename T>
Array2<T> ydelta_of(const std::vector<T>& s, std::size_t n) {
    Array2<T> out = delta1_of(s, n);
    for (std::size_t j = 0; j < n; ++j) out.at(0, j) = T(0);
    return out;
}

template <typename T>
void add_into(Array2<T>& acc, const Array2<T>& x, T sign = T(1)) {
    for (std::size_t k = 0; k < acc.v.size(); ++k) acc.v[k] += sign * x.v[k];
}

// forward difference s_t - s_{t-1}
template <typename T>
std::vector<T> diff_series(const std::vector<T>& s) {
    std::vector<T> out(s.size());
    for (std::size_t t = 0; t < s.size(); ++t)
        out[t] = series_coeff(s, static_cast<long>(t)) -
                 series_coeff(s, static_cast<long>(t) - 1);
    return out;
}

// The memory-operator array multiplying a_{t'-tau',t-tau} in the SE
// difference equation, assembled term by term from the time-domain form:
//   (p_{tau'+tau} - p_{tau'+tau+1})*q_tau + (p_tau - p_{tau-1})*q_{tau'+tau+1}
// + (p_{tau-1} - p_tau)*r_{tau'+tau+1}  + (r_tau - r_{tau-1})*p_{tau'+tau+1}
// + p_tau*(r_{tau'+tau} - d_{tau',0} r_tau) - r_tau*(p_{tau'+tau} - d_{tau',0} p_tau)
template <typename T>
Array2<T> memory_kernel(const std::vector<T>& p, const std::vector<T>& q,
                        const std::vector<T>& r, std::size_t n) {
    std::vector<T> dp = diff_series(p);
    std::vector<T> mdp(dp.size());
    for (std::size_t t = 0; t < dp.size(); ++t) mdp[t] = -dp[t];
    std::vector<T> dr = diff_series(r);

    Array2<T> d1_minus_d(n);
    add_into(d1_minus_d, delta1_of(p, n));
    add_into(d1_minus_d, delta_of(p, n), T(-1));

    Array2<T> out = conv2(d1_minus_d, embed_z(q, n));
    add_into(out, conv2(embed_z(dp, n), delta_of(q, n)));
    add_into(out, conv2(embed_z(mdp, n), delta_of(r, n)));
    add_into(out, conv2(embed_z(dr, n), delta_of(p, n)));
    add_into(out, conv2(embed_z(p, n), ydelta_of(r, n)));
    add_into(out, conv2(embed_z(r, n), ydelta_of(p, n)), T(-1));
    return out;
}

// Coefficient array multiplying d_{t'-tau',t-tau}:
//   p_tau * r_{tau'+tau+1} - r_tau * p_{tau'+tau+1}
template <typename T>
Array2<T> correlation_kernel(const std::vector<T>& p, const std::vector<T>& r,
                             std::size_t n) {
    Array2<T> out = conv2(embed_z(p, n), delta_of(r, n));
    add_into(out, conv2(embed_z(r, n), delta_of(p, n)), T(-1));
    return out;
}

// Coefficient array multiplying sigma^2:
//   (q_{tau'} q_tau) * (theta_{tau'+tau} - theta_{tau'+tau+1})
template <typename T>
Array2<T> noise_kernel(const std::vector<T>& q, const std::vector<T>& theta,
                       std::size_t n) {
    Array2<T> outer(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            outer.at(i, j) = series_coeff(q, i) * series_coeff(q, j);
    Array2<T> dtheta(n);
    add_into(dtheta, delta1_of(theta, n));
    add_into(dtheta, delta_of(theta, n), T(-1));
    return conv2(outer, dtheta);
}

}  // namespace camp::detail
