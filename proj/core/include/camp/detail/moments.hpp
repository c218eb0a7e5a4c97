#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "camp/detail/quad.hpp"
#include "camp/detail/series_ops.hpp"

namespace camp::detail {

// Asymptotic eigenvalue moments of A^T A for the geometric singular-value
// ladder: mu_j = (C/(1-kappa^{-2}))^j (1-kappa^{-2j})/(C j), C = 2 ln(kappa)/delta.
// Templated so the tap oracle can evaluate them in extended precision; the
// only transcendental involved, ln(kappa), is computed by qlog.
template <typename T>
std::vector<T> moments_geometric_t(double kappa, double delta, std::size_t max_order) {
    if (!(kappa > 1.0))
        throw std::invalid_argument(
            "moments_geometric: kappa must exceed 1 (use row_orthogonal for kappa == 1)");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("moments_geometric: delta must lie in (0, 1]");
    const T log_kappa = static_cast<T>(qlog(kappa));
    const T c = T(2) * log_kappa / static_cast<T>(delta);
    const T ki2 = T(1) / (static_cast<T>(kappa) * static_cast<T>(kappa));
    const T base = c / (T(1) - ki2);
    std::vector<T> mu(max_order + 1, T(0));
    mu[0] = T(1);
    T base_pow = T(1);
    T ki2_pow = T(1);
    for (std::size_t j = 1; j <= max_order; ++j) {
        base_pow *= base;
        ki2_pow *= ki2;
        mu[j] = base_pow * (T(1) - ki2_pow) / (c * static_cast<T>(j));
    }
    return mu;
}

// Two-atom law {1/delta w.p. delta, 0 w.p. 1-delta}: mu_j = delta^{1-j}.
template <typename T>
std::vector<T> moments_row_orthogonal_t(double delta, std::size_t max_order) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("moments_row_orthogonal: delta must lie in (0, 1]");
    std::vector<T> mu(max_order + 1, T(0));
    mu[0] = T(1);
    const T inv_delta = T(1) / static_cast<T>(delta);
    T v = T(1);
    for (std::size_t j = 1; j <= max_order; ++j) {
        mu[j] = v;
        v *= inv_delta;
    }
    return mu;
}

// Moments from free cumulants via M(z) = C(z M(z)), where
// M(z) = 1 + sum_n m_n z^n and C(x) = 1 + sum_n c_n x^n. Solved by
// fixed-point sweeps on the truncated series; each sweep settles one more
// order, so max_order sweeps suffice.
template <typename T>
std::vector<T> moments_from_free_cumulants_t(const std::vector<T>& cumulants,
                                             std::size_t max_order) {
    const std::size_t n = max_order + 1;
    std::vector<T> m(n, T(0));
    m[0] = T(1);
    for (std::size_t sweep = 0; sweep < max_order; ++sweep) {
        // w = z*M(z) as a series in z (w has zero constant term).
        std::vector<T> w(n, T(0));
        for (std::size_t t = 1; t < n; ++t) w[t] = m[t - 1];
        // Horner evaluation of C(w) = 1 + w*(c_1 + w*(c_2 + ...)).
        std::vector<T> acc(n, T(0));
        for (std::size_t j = cumulants.size(); j-- > 1;) {
            acc[0] += cumulants[j];
            acc = series_convolve(acc, w);
        }
        acc[0] += T(1);
        m = acc;
    }
    return m;
}

// Free cumulants from moments: the same functional equation solved in the
// other direction, order by order.
template <typename T>
std::vector<T> free_cumulants_from_moments_t(const std::vector<T>& moments,
                                             std::size_t max_order) {
    const std::size_t n = max_order + 1;
    std::vector<T> w(n, T(0));
    for (std::size_t t = 1; t < n && t <= moments.size(); ++t) w[t] = moments[t - 1];
    std::vector<T> c(n, T(0));  // c[j] is the jth free cumulant, c[0] unused
    std::vector<T> wpow(n, T(0));
    wpow[0] = T(1);
    std::vector<std::vector<T>> powers;
    powers.push_back(wpow);
    for (std::size_t j = 1; j < n; ++j) powers.push_back(series_convolve(powers.back(), w));
    for (std::size_t k = 1; k < n; ++k) {
        T acc = (k < moments.size()) ? moments[k] : T(0);
        for (std::size_t j = 1; j < k; ++j) acc -= c[j] * powers[j][k];
        // [z^k] w^k = m_0^k = 1
        c[k] = acc;
    }
    return c;
}

// i.i.d. Gaussian ensemble: free cumulants of the Marchenko-Pastur limit are
// c_j = delta^{1-j}, obtained from R(x) = delta/(delta - x).
template <typename T>
std::vector<T> moments_iid_gaussian_t(double delta, std::size_t max_order) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("moments_iid_gaussian: delta must lie in (0, 1]");
    std::vector<T> c(max_order + 1, T(0));
    const T inv_delta = T(1) / static_cast<T>(delta);
    T v = T(1);
    for (std::size_t j = 1; j <= max_order; ++j) {
        c[j] = v;
        v *= inv_delta;
    }
    return moments_from_free_cumulants_t(c, max_order);
}

}  // namespace camp::detail
