#include <doctest.h>


#include <stdexcept>
#include "camp/series.hpp"

using camp::Series;

TEST_CASE("convolution identity element") {
    Series b({3.0, -1.0, 2.0, 0.5}, 5);
    CHECK(Series::identity(5).convolve(b) == b);
}

TEST_CASE("convolution of (1,1) with itself") {
    Series a({1.0, 1.0}, 4);
    const Series c = a.convolve(a);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 2.0);
    CHECK(c[2] == 1.0);
    CHECK(c[3] == 0.0);
}

TEST_CASE("shift by one") {
    Series a({1.0, 2.0, 3.0}, 2);
    const Series s = a.shift(1);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 1.0);
    CHECK(s[2] == 2.0);
}

TEST_CASE("negative and out-of-range lags read as zero") {
    Series a({1.0, 2.0}, 3);
    CHECK(a.at(-1) == 0.0);
    CHECK(a.at(7) == 0.0);
    CHECK(a.at(1) == 2.0);
}

TEST_CASE("horizon mismatch is rejected") {
    Series a(3), b(4);
    CHECK_THROWS_AS(a.convolve(b), std::invalid_argument);
    CHECK_THROWS_AS(a.add(b), std::invalid_argument);
}

TEST_CASE("division inverts convolution") {
    Series q({1.0, -0.5, 0.25}, 6);
    Series p({1.0, 0.3, -0.2, 0.7}, 6);
    const Series g = p.divide(q);
    const Series back = q.convolve(g);
    for (std::size_t t = 0; t <= 6; ++t) CHECK(back[t] == doctest::Approx(p[t]).epsilon(1e-12));
}

TEST_CASE("commutativity and associativity up to truncation") {
    Series a({0.5, 1.0, -2.0}, 5);
    Series b({1.0, 0.25}, 5);
    Series c({2.0, -1.0, 0.1, 0.3}, 5);
    CHECK(a.convolve(b) == b.convolve(a));
    const Series left = a.convolve(b).convolve(c);
    const Series right = a.convolve(b.convolve(c));
    for (std::size_t t = 0; t <= 5; ++t)
        CHECK(left[t] == doctest::Approx(right[t]).epsilon(1e-12));
}
