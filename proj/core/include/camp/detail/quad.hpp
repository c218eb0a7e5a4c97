#pragma once

#include <cmath>
#include <cstdint>

namespace camp::detail {

// Extended-precision scalar for the numerically fragile recursions (tap
// oracle, generating-function residuals). Plain +,-,*,/ on __float128 are
// compiler builtins, so no libquadmath dependency is needed; the one
// transcendental we require (log of a double) is provided below.
#if defined(__SIZEOF_FLOAT128__)
using quad = __float128;
#else
using quad = long double;
#endif

inline double to_double(quad x) { return static_cast<double>(x); }

inline quad qabs(quad x) { return x < 0 ? -x : x; }

// log(2) as a double-double pair; the sum is accurate to ~1e-32.
inline quad qln2() {
    return static_cast<quad>(0x1.62e42fefa39efp-1) +
           static_cast<quad>(0x1.abc9e3b39803fp-56);
}

// Natural log of a positive double, accurate to quad precision.
// Reduces x = m * 2^e with m in [2/3, 4/3), then sums the atanh series
// log(m) = 2 * sum u^(2k+1)/(2k+1), u = (m-1)/(m+1), |u| <= 0.2.
inline quad qlog(double x) {
    int e = 0;
    double m = std::frexp(x, &e);  // m in [0.5, 1)
    if (m < 2.0 / 3.0) {
        m *= 2.0;
        e -= 1;
    }
    const quad u = (static_cast<quad>(m) - 1) / (static_cast<quad>(m) + 1);
    const quad u2 = u * u;
    quad term = u;
    quad sum = u;
    for (int k = 1; k < 40; ++k) {
        term *= u2;
        sum += term / static_cast<quad>(2 * k + 1);
        if (qabs(term) < static_cast<quad>(1e-40) * qabs(sum)) break;
    }
    return 2 * sum + static_cast<quad>(e) * qln2();
}

}  // namespace camp::detail
